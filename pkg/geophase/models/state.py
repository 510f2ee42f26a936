"""
Quantum state models.

Density matrices, kets, bipartitions and one-parameter state families.
Party 0 is the most significant digit of the computational-basis index.
"""

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from .base import ComplexMatrix, GeophaseError


class StateError(GeophaseError):
    """Exception raised for invalid states, cuts or subsystem layouts."""

    pass


TRACE_TOL = 1e-10
EIGEN_TOL = 1e-10
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix on a tensor product."""

    matrix: ComplexMatrix
    dims: Tuple[int, ...]

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        dims = tuple(int(d) for d in self.dims)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise StateError(f"Density matrix must be square, got {matrix.shape}")
        if not dims or any(d < 1 for d in dims):
            raise StateError(f"Invalid subsystem dimensions {dims}")
        if int(np.prod(dims)) != matrix.shape[0]:
            raise StateError(
                f"Subsystem dimensions {dims} do not match matrix size {matrix.shape[0]}"
            )
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-12:
            raise StateError("Density matrix is not Hermitian")
        matrix = (matrix + matrix.conj().T) / 2
        trace = float(np.real(np.trace(matrix)))
        if abs(trace - 1.0) > TRACE_TOL:
            raise StateError(f"Density matrix trace is {trace}, expected 1")
        min_eig = float(np.linalg.eigvalsh(matrix)[0])
        if min_eig < -EIGEN_TOL:
            raise StateError(f"Density matrix has negative eigenvalue {min_eig:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def party_count(self) -> int:
        return len(self.dims)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized pure state vector."""

    amplitudes: np.ndarray
    dims: Tuple[int, ...]

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != amplitudes.size:
            raise StateError(
                f"Subsystem dimensions {dims} do not match ket size {amplitudes.size}"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"Ket squared norm is {norm}, expected 1")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> DensityMatrix:
        """Return |psi><psi| as a density matrix."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, order=True)
class Bipartition:
    """A cut M | complement; canonical members always contain party 0."""

    party_count: int
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(p) for p in self.members)))
        if self.party_count < 2:
            raise StateError("A bipartition needs at least two parties")
        if not members or len(members) >= self.party_count:
            raise StateError(f"Members {members} are not a nonempty proper subset")
        if members[0] < 0 or members[-1] >= self.party_count:
            raise StateError(f"Members {members} out of range for {self.party_count}")
        if 0 not in members:
            members = tuple(p for p in range(self.party_count) if p not in members)
        object.__setattr__(self, "members", members)

    @property
    def complement(self) -> Tuple[int, ...]:
        return tuple(p for p in range(self.party_count) if p not in self.members)

    @property
    def label(self) -> str:
        """Letter notation such as ``AB|C``."""
        letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        left = "".join(letters[p] for p in self.members)
        right = "".join(letters[p] for p in self.complement)
        return f"{left}|{right}"


@dataclass(frozen=True)
class StateFamily:
    """Named map from q in [0, 1] to a density matrix."""

    name: str
    generator: Callable[[float], DensityMatrix] = field(compare=False)
    dims: Tuple[int, ...] = ()

    def __call__(self, q: float) -> DensityMatrix:
        if not 0.0 <= q <= 1.0:
            raise StateError(f"Family parameter q={q} outside [0, 1]")
        return self.generator(float(q))
