"""
Dense complex-matrix substrate.

Hermitian eigendecomposition, PSD projection, tensor products and
Hilbert-Schmidt inner products over numpy arrays.
"""

import logging
from functools import reduce
from typing import Sequence

import numpy as np

from ..models.base import ComplexMatrix, GeophaseError, HermitianMatrix, Spectrum

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12


class NumericsError(GeophaseError):
    """Exception raised for invalid matrix inputs."""

    pass


def _as_square(m: np.ndarray) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NumericsError(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Check entry(i, j) == conj(entry(j, i)) within an absolute tolerance."""
    arr = _as_square(m)
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol)


def hermitize(m: np.ndarray) -> HermitianMatrix:
    """Return the Hermitian part (m + m^dagger) / 2."""
    arr = _as_square(m)
    return (arr + arr.conj().T) / 2


def herm_eig(m: np.ndarray, tol: float = HERMITIAN_TOL) -> Spectrum:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        m: Hermitian matrix
        tol: Absolute Hermiticity tolerance

    Returns:
        Spectrum with ascending eigenvalues and orthonormal eigenvectors

    Raises:
        NumericsError: If ``m`` is not Hermitian within ``tol``
    """
    arr = _as_square(m)
    deviation = float(np.max(np.abs(arr - arr.conj().T), initial=0.0))
    if deviation > tol:
        raise NumericsError(
            f"Matrix is not Hermitian: max |m - m^dagger| = {deviation:.3e} > {tol:.1e}"
        )
    eigenvalues, eigenvectors = np.linalg.eigh(hermitize(arr))
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m``."""
    return float(np.linalg.eigvalsh(hermitize(m))[0])


def psd_project(m: np.ndarray, renormalize_trace: bool = False) -> HermitianMatrix:
    """
    Frobenius-closest PSD matrix by clipping negative eigenvalues.

    Args:
        m: Hermitian matrix
        renormalize_trace: Rescale the clipped matrix to unit trace

    Returns:
        PSD Hermitian matrix

    Raises:
        NumericsError: If renormalization is requested and nothing survives clipping
    """
    spectrum = herm_eig(m, tol=max(HERMITIAN_TOL, 1e-9))
    clipped = np.clip(spectrum.eigenvalues, 0.0, None)
    if renormalize_trace:
        total = float(np.sum(clipped))
        if total <= 0.0:
            raise NumericsError("Cannot renormalize: spectrum is entirely nonpositive")
        clipped = clipped / total
    v = spectrum.eigenvectors
    return hermitize((v * clipped) @ v.conj().T)


def tensor_product(a: np.ndarray, b: np.ndarray) -> ComplexMatrix:
    """Kronecker product with the first factor most significant."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def tensor_many(factors: Sequence[np.ndarray]) -> ComplexMatrix:
    """n-fold Kronecker product of matrices or vectors."""
    if not factors:
        raise NumericsError("tensor_many needs at least one factor")
    return reduce(tensor_product, factors)


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """
    Hilbert-Schmidt pairing Tr(a b) of two Hermitian matrices.

    Raises:
        NumericsError: On dimension mismatch or a non-negligible imaginary part
    """
    arr_a, arr_b = _as_square(a), _as_square(b)
    if arr_a.shape != arr_b.shape:
        raise NumericsError(f"Dimension mismatch: {arr_a.shape} vs {arr_b.shape}")
    value = np.sum(arr_a * arr_b.T)
    scale = max(1.0, float(np.linalg.norm(arr_a) * np.linalg.norm(arr_b)))
    if abs(value.imag) > 1e-12 * scale:
        raise NumericsError(f"Tr(ab) has imaginary part {value.imag:.3e}")
    return float(value.real)


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of a - b."""
    eigenvalues = np.linalg.eigvalsh(hermitize(np.asarray(a) - np.asarray(b)))
    return float(np.sum(np.abs(eigenvalues)) / 2)


def psd_sqrt(m: np.ndarray) -> HermitianMatrix:
    """Principal square root of the PSD part of ``m``."""
    spectrum = herm_eig(m, tol=max(HERMITIAN_TOL, 1e-9))
    v = spectrum.eigenvectors
    return hermitize((v * np.sqrt(np.clip(spectrum.eigenvalues, 0.0, None))) @ v.conj().T)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    root = psd_sqrt(rho)
    inner = np.linalg.eigvalsh(hermitize(root @ psd_project(sigma) @ root))
    return float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)
