"""
Semidefinite program models.

Standard form over real symmetric blocks:

    minimize <C, X>  subject to  <A_i, X> = b_i,  X >= 0 (block diagonal)

with dual  maximize b.y  subject to  S = C - sum_i y_i A_i >= 0.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np

from .base import GeophaseError, RealMatrix


class SolverError(GeophaseError):
    """Exception raised for malformed or inconsistent programs."""

    pass


class SdpStatus(str, Enum):
    """Termination status of the interior-point solver."""

    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    SLOW_PROGRESS = "slow_progress"


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """
    Block-diagonal SDP in standard form.

    ``c[j]`` is the objective block j and ``a[j]`` stacks every constraint's
    block j with shape (m, n_j, n_j). Build instances through
    ``services.sdp_solver.make_problem`` so redundant rows are removed.
    """

    block_sizes: Tuple[int, ...]
    c: List[RealMatrix]
    a: List[np.ndarray]
    b: np.ndarray
    removed_rows: Tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.c) != len(self.block_sizes) or len(self.a) != len(self.block_sizes):
            raise SolverError("Objective/constraint blocks do not match block sizes")
        m = self.b.shape[0]
        for j, n in enumerate(self.block_sizes):
            if self.c[j].shape != (n, n):
                raise SolverError(f"Objective block {j} has shape {self.c[j].shape}")
            if self.a[j].shape != (m, n, n):
                raise SolverError(f"Constraint block {j} has shape {self.a[j].shape}")

    @property
    def constraint_count(self) -> int:
        return int(self.b.shape[0])

    @property
    def order(self) -> int:
        """Total matrix order, the barrier parameter of the cone."""
        return int(sum(self.block_sizes))

    def apply(self, x: List[RealMatrix]) -> np.ndarray:
        """Evaluate A(X) = (<A_i, X>)_i."""
        out = np.zeros(self.constraint_count)
        for a_j, x_j in zip(self.a, x):
            out += np.einsum("ikl,kl->i", a_j, x_j)
        return out

    def adjoint(self, y: np.ndarray) -> List[RealMatrix]:
        """Evaluate A^T(y) = sum_i y_i A_i blockwise."""
        return [np.einsum("i,ikl->kl", y, a_j) for a_j in self.a]

    def objective(self, x: List[RealMatrix]) -> float:
        return float(sum(np.sum(c_j * x_j) for c_j, x_j in zip(self.c, x)))


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Primal/dual pair returned by the solver with its residuals."""

    x: List[RealMatrix]
    y: np.ndarray
    s: List[RealMatrix]
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    status: SdpStatus
    iterations: int

    @property
    def gap(self) -> float:
        return abs(self.primal_objective - self.dual_objective)

    @property
    def is_optimal(self) -> bool:
        return self.status is SdpStatus.OPTIMAL


@dataclass(frozen=True)
class CertificateCheck:
    """One independently recomputed optimality condition."""

    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of ``validate_certificates``."""

    checks: Tuple[CertificateCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]
