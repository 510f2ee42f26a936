"""
Pydantic schemas package.

Exports all JSON encodings for easy importing.
"""

from .family import FamilyFilePayload, FamilySample
from .matrix import KetPayload, MatrixPayload, StatePayload
from .robustness import RobustnessPayload
from .run_config import RunConfig
from .scan import KinkPayload, PhasePayload, ScanSummaryPayload
from .sdp import ConstraintPayload, SdpProblemPayload
from .tomography import CountsRecordPayload
from .witness import CertificatePayload, WitnessPayload

__all__ = [
    "FamilyFilePayload",
    "FamilySample",
    "KetPayload",
    "MatrixPayload",
    "StatePayload",
    "RobustnessPayload",
    "RunConfig",
    "KinkPayload",
    "PhasePayload",
    "ScanSummaryPayload",
    "ConstraintPayload",
    "SdpProblemPayload",
    "CountsRecordPayload",
    "CertificatePayload",
    "WitnessPayload",
]
