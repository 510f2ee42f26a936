"""
Tomography simulation models.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .base import GeophaseError, HermitianMatrix
from .state import DensityMatrix


class TomographyError(GeophaseError):
    """Exception raised for invalid settings, records or tables."""

    pass


PAULI_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class MeasurementSetting:
    """One local Pauli axis per qubit."""

    axes: Tuple[str, ...]

    def __post_init__(self):
        axes = tuple(a.upper() for a in self.axes)
        if not axes or any(a not in PAULI_AXES for a in axes):
            raise TomographyError(f"Invalid measurement setting {self.axes}")
        object.__setattr__(self, "axes", axes)

    @property
    def qubit_count(self) -> int:
        return len(self.axes)

    @property
    def label(self) -> str:
        return "".join(self.axes)


@dataclass(frozen=True, eq=False)
class CountsRecord:
    """
    Outcome counts of one setting.

    ``shots == 0`` marks exact mode, where ``counts`` holds probabilities.
    """

    setting: MeasurementSetting
    shots: int
    counts: np.ndarray

    def __post_init__(self):
        if self.counts.shape != (2**self.setting.qubit_count,):
            raise TomographyError(
                f"Expected {2 ** self.setting.qubit_count} outcomes, got {self.counts.shape}"
            )
        if np.any(self.counts < 0):
            raise TomographyError("Counts must be nonnegative")
        total = float(np.sum(self.counts))
        expected = 1.0 if self.shots == 0 else float(self.shots)
        if abs(total - expected) > 1e-9 * max(1.0, expected):
            raise TomographyError(f"Counts sum to {total}, expected {expected}")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    @property
    def frequencies(self) -> np.ndarray:
        if self.exact:
            return self.counts.astype(float)
        return self.counts / float(self.shots)


@dataclass(frozen=True)
class PauliExpectations:
    """Estimated Pauli-string expectations with standard errors."""

    qubit_count: int
    values: Dict[str, float]
    stderrs: Dict[str, float]
    shots: int = 0


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Linear-inversion estimate before and after PSD projection."""

    estimate: DensityMatrix
    raw: HermitianMatrix
    fidelity: Optional[float] = None
    total_shots: int = 0
    method: str = "linear-inversion+eigenvalue-clip"


@dataclass(frozen=True)
class WitnessEstimate:
    """Witness expectation estimated from measured Pauli expectations."""

    estimate: float
    stderr: float
    detected: bool


@dataclass(frozen=True)
class ExperimentRow:
    """One grid point of the simulated experiment."""

    q: float
    estimate: float
    stderr: float
    truth: float
    shots: int
    seed: int
    detected: bool = False
    notes: Tuple[str, ...] = field(default_factory=tuple)
