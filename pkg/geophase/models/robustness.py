"""
Robustness result models.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from .base import GeophaseError, HermitianMatrix
from .sdp import SdpStatus
from .state import DensityMatrix, Ket
from .witness import Witness


class RobustnessError(GeophaseError):
    """Exception raised when a robustness computation cannot be certified."""

    pass


class SolverStatusError(RobustnessError):
    """The solver returned a non-optimal status."""

    def __init__(self, message: str, status: SdpStatus):
        super().__init__(message)
        self.status = status


class DualityGapError(RobustnessError):
    """Primal and dual values disagree beyond tolerance."""

    pass


class WitnessAuditError(RobustnessError):
    """A witness took a negative value on a sampled model member."""

    pass


class Quantifier(str, Enum):
    """Robustness flavours: white noise or optimal noise."""

    RANDOM = "rr"
    GENERALIZED = "gr"


@dataclass(frozen=True, eq=False)
class RobustnessResult:
    """Certified primal/dual robustness value with witness and boundary state."""

    quantifier: Quantifier
    model: str
    value: float
    dual_value: float
    gap: float
    witness: Witness
    boundary_state: DensityMatrix
    optimal_noise: Optional[DensityMatrix]
    status: SdpStatus
    clamped: bool = False
    components: Tuple[HermitianMatrix, ...] = field(default_factory=tuple)


@dataclass(frozen=True, eq=False)
class PureLambda:
    """Maximal squared overlap of a pure state with k-product states."""

    value: float
    factors: Tuple[Ket, ...]
    structure: Tuple[Tuple[int, ...], ...]
    restarts_used: int
    history: Tuple[float, ...] = ()
