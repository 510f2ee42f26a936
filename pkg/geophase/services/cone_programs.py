"""
Complex Hermitian cone programs compiled to real standard-form SDPs.

Variables are Hermitian PSD matrices (stored as real 2d x 2d blocks) and
nonnegative scalars (1 x 1 blocks). Linear functionals are written as
``Re Tr(A Z)`` for Hermitian coefficients A; matrix equalities are expanded
over an orthonormal Hermitian basis.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from ..models.sdp import SdpProblem, SdpSolution
from ..models.state import Bipartition
from ..models.witness import SeparabilityError
from .sdp_solver import compress_embedding, hermitian_embedding, make_problem
from .states import partial_transpose_matrix

logger = logging.getLogger(__name__)

Coefficient = Union[float, np.ndarray]


@dataclass(frozen=True)
class Term:
    """One summand of a matrix equality.

    Hermitian variable: ``weight * Z`` or ``weight * Z^{T_cut}``.
    Scalar variable: ``weight * t * matrix``.
    """

    var: str
    weight: float = 1.0
    transpose: Optional[Bipartition] = None
    matrix: Optional[np.ndarray] = None


@dataclass(frozen=True)
class _Variable:
    name: str
    hermitian: bool
    dim: int
    block: int


def hermitian_basis(d: int) -> List[np.ndarray]:
    """Orthonormal basis of d x d Hermitian matrices under Tr(A B)."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, i] = 1.0
        basis.append(e)
    scale = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = e[j, i] = scale
            basis.append(e)
            e = np.zeros((d, d), dtype=np.complex128)
            e[i, j] = 1j * scale
            e[j, i] = -1j * scale
            basis.append(e)
    return basis


def _real_pairing(a: np.ndarray, b: np.ndarray) -> float:
    """Re Tr(A B) for Hermitian A, B."""
    return float(np.real(np.sum(a * b.T)))


class ConeProgram:
    """Builder for a minimization program over Hermitian PSD and scalar variables."""

    def __init__(self, dims: Sequence[int], label: str = "program"):
        self.dims = tuple(dims)
        self.dim = int(np.prod(self.dims))
        self.label = label
        self.offset = 0.0
        self._variables: Dict[str, _Variable] = {}
        self._rows: List[Dict[str, Coefficient]] = []
        self._rhs: List[float] = []
        self._objective: Dict[str, Coefficient] = {}
        self._problem: Optional[SdpProblem] = None

    # Variables

    def _add(self, name: str, hermitian: bool, dim: int) -> str:
        if name in self._variables:
            raise SeparabilityError(f"Variable {name} declared twice")
        self._variables[name] = _Variable(name, hermitian, dim, len(self._variables))
        self._problem = None
        return name

    def hermitian(self, name: str, dim: Optional[int] = None) -> str:
        """Declare a Hermitian PSD variable (default size: the full space)."""
        return self._add(name, True, dim or self.dim)

    def scalar(self, name: str) -> str:
        """Declare a nonnegative scalar variable."""
        return self._add(name, False, 1)

    @property
    def variables(self) -> List[str]:
        return list(self._variables)

    # Constraints

    def _check(self, name: str) -> _Variable:
        if name not in self._variables:
            raise SeparabilityError(f"Unknown variable {name}")
        return self._variables[name]

    def add_scalar_constraint(self, terms: Mapping[str, Coefficient], rhs: float) -> None:
        """Add ``sum Re Tr(A_v Z_v) + sum a_t t = rhs``."""
        row = {}
        for name, coef in terms.items():
            var = self._check(name)
            row[name] = np.asarray(coef, dtype=np.complex128) if var.hermitian else float(coef)
        self._rows.append(row)
        self._rhs.append(float(rhs))
        self._problem = None

    def add_matrix_constraint(self, terms: Sequence[Term], rhs: np.ndarray) -> None:
        """Add a Hermitian matrix equality ``sum terms = rhs``, one row per basis element."""
        rhs = np.asarray(rhs, dtype=np.complex128)
        d = rhs.shape[0]
        for term in terms:
            var = self._check(term.var)
            if var.hermitian and var.dim != d:
                raise SeparabilityError(f"Variable {term.var} has size {var.dim}, expected {d}")
            if not var.hermitian and (term.matrix is None or term.matrix.shape != (d, d)):
                raise SeparabilityError(f"Scalar term {term.var} needs a {d}x{d} matrix")

        for e in hermitian_basis(d):
            row: Dict[str, Coefficient] = {}
            for term in terms:
                var = self._variables[term.var]
                if var.hermitian:
                    # The partial transpose is self-adjoint under Tr(A B).
                    coef = (
                        partial_transpose_matrix(e, self.dims, term.transpose)
                        if term.transpose is not None
                        else e
                    )
                    row[term.var] = row.get(term.var, 0) + term.weight * coef
                else:
                    row[term.var] = row.get(term.var, 0.0) + term.weight * _real_pairing(
                        e, term.matrix
                    )
            self._rows.append(row)
            self._rhs.append(_real_pairing(e, rhs))
        self._problem = None

    def set_objective(self, terms: Mapping[str, Coefficient], offset: float = 0.0) -> None:
        """Minimize ``sum Re Tr(C_v Z_v) + sum c_t t + offset``."""
        self._objective = {}
        for name, coef in terms.items():
            var = self._check(name)
            self._objective[name] = (
                np.asarray(coef, dtype=np.complex128) if var.hermitian else float(coef)
            )
        self.offset = float(offset)
        self._problem = None

    # Compilation

    def _block(self, var: _Variable, coef: Coefficient) -> np.ndarray:
        if var.hermitian:
            return hermitian_embedding(coef) / 2
        return np.array([[coef]], dtype=float)

    @property
    def problem(self) -> SdpProblem:
        """Real standard-form problem (built once, cached)."""
        if self._problem is None:
            self._problem = self._compile()
        return self._problem

    def _compile(self) -> SdpProblem:
        variables = list(self._variables.values())
        sizes = [2 * v.dim if v.hermitian else 1 for v in variables]
        m = len(self._rows)
        a = [np.zeros((m, n, n)) for n in sizes]
        for i, row in enumerate(self._rows):
            for name, coef in row.items():
                var = self._variables[name]
                a[var.block][i] = self._block(var, coef)
        c = [np.zeros((n, n)) for n in sizes]
        for name, coef in self._objective.items():
            var = self._variables[name]
            c[var.block] = self._block(var, coef)
        problem = make_problem(sizes, c, a, np.asarray(self._rhs))
        logger.debug(
            f"Compiled {self.label}: {len(variables)} variables, "
            f"{problem.constraint_count}/{m} independent constraints"
        )
        return problem

    # Solution access

    def unpack(self, solution: SdpSolution) -> Dict[str, Coefficient]:
        """Primal variable values (complex matrices or floats)."""
        values: Dict[str, Coefficient] = {}
        for var in self._variables.values():
            block = solution.x[var.block]
            values[var.name] = compress_embedding(block) if var.hermitian else float(block[0, 0])
        return values

    def unpack_slack(self, solution: SdpSolution) -> Dict[str, Coefficient]:
        """Dual slack per variable in the complex pairing."""
        values: Dict[str, Coefficient] = {}
        for var in self._variables.values():
            block = solution.s[var.block]
            values[var.name] = (
                2 * compress_embedding(block) if var.hermitian else float(block[0, 0])
            )
        return values

    def objective_value(self, solution: SdpSolution) -> float:
        return solution.primal_objective + self.offset

    def dual_value(self, solution: SdpSolution) -> float:
        return solution.dual_objective + self.offset
