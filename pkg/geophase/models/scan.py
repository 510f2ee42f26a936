"""
Scan analysis models.

Sampled robustness curves with kinks, witness jumps and phase intervals.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .base import GeophaseError
from .robustness import Quantifier, RobustnessResult


class ScanError(GeophaseError):
    """Exception raised when a scan cannot be completed or analyzed."""

    pass


@dataclass
class KinkReport:
    """A detected (and possibly refined) singular point of a curve."""

    location: float
    left_slope: float
    right_slope: float
    score: float
    refined: bool = False
    corroborated: Optional[bool] = None
    reference: Optional[float] = None
    deviation: Optional[float] = None
    diagnostic: Optional[str] = None
    candidates: Tuple[float, ...] = ()


@dataclass(frozen=True)
class WitnessJump:
    """Consecutive grid interval across which the optimal witness jumps."""

    q_left: float
    q_right: float
    size: float


@dataclass(frozen=True)
class PhaseInterval:
    """Labeled q-interval: ``Separable`` or ``Entangled-i``."""

    label: str
    q_start: float
    q_end: float


@dataclass
class ScanResult:
    """Robustness curve of a one-parameter family."""

    family: str
    quantifier: Quantifier
    model: str
    grid: List[float]
    curve: List[Optional[RobustnessResult]]
    failures: List[str] = field(default_factory=list)
    kinks: List[KinkReport] = field(default_factory=list)
    witness_jumps: List[WitnessJump] = field(default_factory=list)
    witness_distances: List[float] = field(default_factory=list)
    phases: List[PhaseInterval] = field(default_factory=list)
    lipschitz: float = 0.0

    @property
    def values(self) -> List[Optional[float]]:
        return [None if point is None else point.value for point in self.curve]

    @property
    def spacing(self) -> float:
        return self.grid[1] - self.grid[0]


@dataclass(frozen=True)
class FixedWitnessTable:
    """Expectations of fixed witnesses along a family grid."""

    grid: Tuple[float, ...]
    values: Tuple[Tuple[float, ...], ...]
    envelope: Tuple[float, ...]
    crossings: Tuple[float, ...]
