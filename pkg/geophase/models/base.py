"""
Base domain types shared by every module.

Matrices are plain numpy arrays; the aliases below document intent.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt


ComplexMatrix = npt.NDArray[np.complex128]
HermitianMatrix = npt.NDArray[np.complex128]
RealMatrix = npt.NDArray[np.float64]


class GeophaseError(Exception):
    """Base exception for all library errors."""

    pass


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> ComplexMatrix:
        """Return V diag(lambda) V^dagger."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T
