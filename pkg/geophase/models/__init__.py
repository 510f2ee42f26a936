"""
Domain models package.

Exports all value types for easy importing.
"""

from .base import ComplexMatrix, GeophaseError, HermitianMatrix, RealMatrix, Spectrum
from .state import Bipartition, DensityMatrix, Ket, StateError, StateFamily
from .sdp import (
    CertificateCheck,
    CertificateReport,
    SdpProblem,
    SdpSolution,
    SdpStatus,
    SolverError,
)
from .witness import (
    CertificateError,
    CertificateMode,
    Membership,
    ModelKind,
    Normalization,
    SeparabilityError,
    SeparabilityModel,
    Witness,
    WitnessCertificate,
)
from .robustness import (
    DualityGapError,
    PureLambda,
    Quantifier,
    RobustnessError,
    RobustnessResult,
    SolverStatusError,
    WitnessAuditError,
)
from .scan import (
    FixedWitnessTable,
    KinkReport,
    PhaseInterval,
    ScanError,
    ScanResult,
    WitnessJump,
)
from .tomography import (
    CountsRecord,
    ExperimentRow,
    MeasurementSetting,
    PauliExpectations,
    ReconstructionResult,
    TomographyError,
    WitnessEstimate,
)

__all__ = [
    "ComplexMatrix",
    "GeophaseError",
    "HermitianMatrix",
    "RealMatrix",
    "Spectrum",
    "Bipartition",
    "DensityMatrix",
    "Ket",
    "StateError",
    "StateFamily",
    "CertificateCheck",
    "CertificateReport",
    "SdpProblem",
    "SdpSolution",
    "SdpStatus",
    "SolverError",
    "CertificateError",
    "CertificateMode",
    "Membership",
    "ModelKind",
    "Normalization",
    "SeparabilityError",
    "SeparabilityModel",
    "Witness",
    "WitnessCertificate",
    "DualityGapError",
    "PureLambda",
    "Quantifier",
    "RobustnessError",
    "RobustnessResult",
    "SolverStatusError",
    "WitnessAuditError",
    "FixedWitnessTable",
    "KinkReport",
    "PhaseInterval",
    "ScanError",
    "ScanResult",
    "WitnessJump",
    "CountsRecord",
    "ExperimentRow",
    "MeasurementSetting",
    "PauliExpectations",
    "ReconstructionResult",
    "TomographyError",
    "WitnessEstimate",
]
