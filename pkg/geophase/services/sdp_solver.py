"""
Dense primal-dual interior-point solver for small block SDPs.

Infeasible-start path following with the HKM search direction and a
Mehrotra predictor-corrector; the Schur complement is factored by dense
Cholesky. Complex Hermitian programs reach this module through the real
embedding [[Re, -Im], [Im, Re]].
"""

import hashlib
import logging
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from ..config import Settings, settings
from ..models.base import RealMatrix
from ..models.sdp import (
    CertificateCheck,
    CertificateReport,
    SdpProblem,
    SdpSolution,
    SdpStatus,
    SolverError,
)
from ..schemas.matrix import MatrixPayload
from ..schemas.sdp import ConstraintPayload, SdpProblemPayload

logger = logging.getLogger(__name__)


def hermitian_embedding(h: np.ndarray) -> RealMatrix:
    """Real symmetric 2d x 2d image [[Re h, -Im h], [Im h, Re h]] of a Hermitian h."""
    h = np.asarray(h, dtype=np.complex128)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def compress_embedding(y: np.ndarray) -> np.ndarray:
    """Left inverse of ``hermitian_embedding`` that maps PSD blocks to PSD matrices."""
    n = y.shape[0] // 2
    real = (y[:n, :n] + y[n:, n:]) / 2
    imag = (y[n:, :n] - y[:n, n:]) / 2
    return real + 1j * imag


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2


def make_problem(
    block_sizes: Sequence[int],
    c: Sequence[np.ndarray],
    a: Sequence[np.ndarray],
    b: np.ndarray,
    rank_tol: Optional[float] = None,
) -> SdpProblem:
    """
    Build an SdpProblem, removing linearly dependent constraint rows.

    Raises:
        SolverError: If a dependent row contradicts the independent ones
    """
    rank_tol = rank_tol if rank_tol is not None else settings.sdp_rank_tol
    b = np.asarray(b, dtype=float)
    c = [_sym(np.asarray(c_j, dtype=float)) for c_j in c]
    a = [np.asarray(a_j, dtype=float) for a_j in a]
    m = b.shape[0]
    if m == 0:
        return SdpProblem(tuple(block_sizes), c, a, b)

    flat = np.hstack([a_j.reshape(m, -1) for a_j in a])
    _, r, piv = linalg.qr(flat.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > rank_tol * max(diag[0], 1.0)))
    if rank == m:
        return SdpProblem(tuple(block_sizes), c, a, b)

    keep = np.sort(piv[:rank])
    removed = np.sort(piv[rank:])
    coeffs, *_ = linalg.lstsq(flat[keep].T, flat[removed].T)
    predicted = coeffs.T @ b[keep]
    mismatch = float(np.max(np.abs(predicted - b[removed])))
    if mismatch > 1e-8 * (1.0 + np.linalg.norm(b)):
        raise SolverError(
            f"Equality constraints are inconsistent (dependent row mismatch {mismatch:.3e})"
        )
    logger.debug(f"Removed {len(removed)} redundant constraint rows")
    return SdpProblem(
        tuple(block_sizes),
        c,
        [a_j[keep] for a_j in a],
        b[keep],
        removed_rows=tuple(int(i) for i in removed),
    )


class InteriorPointSolver:
    """Primal-dual path-following SDP solver."""

    def __init__(self, config: Settings = settings):
        """Initialize the solver with numerical settings."""
        self.config = config

    @staticmethod
    def _max_step(x: List[RealMatrix], dx: List[RealMatrix]) -> float:
        """Largest alpha with x + alpha dx PSD in every block (inf if unbounded)."""
        alpha = np.inf
        for x_j, dx_j in zip(x, dx):
            chol = np.linalg.cholesky(x_j)
            inv = linalg.solve_triangular(chol, np.eye(x_j.shape[0]), lower=True)
            lam = float(np.linalg.eigvalsh(_sym(inv @ dx_j @ inv.T))[0])
            if lam < 0:
                alpha = min(alpha, -1.0 / lam)
        return alpha

    @staticmethod
    def _starting_point(problem: SdpProblem):
        m = problem.constraint_count
        x0, s0 = [], []
        for j, n in enumerate(problem.block_sizes):
            a_norms = np.linalg.norm(problem.a[j].reshape(m, -1), axis=1)
            touched = a_norms > 0
            ratio = (
                np.max((1.0 + np.abs(problem.b[touched])) / (1.0 + a_norms[touched]))
                if np.any(touched)
                else 1.0
            )
            xi = max(10.0, np.sqrt(n), n * ratio)
            a_max = float(np.max(a_norms)) if m else 0.0
            eta = max(10.0, np.sqrt(n), float(np.linalg.norm(problem.c[j])), a_max)
            x0.append(xi * np.eye(n))
            s0.append(eta * np.eye(n))
        return x0, np.zeros(m), s0

    def solve(
        self,
        problem: SdpProblem,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
    ) -> SdpSolution:
        """
        Solve a standard-form block SDP.

        Args:
            problem: Program with a strictly feasible primal point
            tol: Relative feasibility tolerance (gap tolerance from settings)
            max_iter: Iteration cap

        Returns:
            SdpSolution; a non-optimal status carries the best iterate
        """
        tol = tol if tol is not None else self.config.sdp_feasibility_tol
        gap_tol = self.config.sdp_gap_tol
        max_iter = max_iter if max_iter is not None else self.config.sdp_max_iter
        frac = self.config.sdp_step_fraction
        bound = self.config.sdp_divergence_bound

        if self.config.sdp_dump_dir:
            dump_problem(problem, self.config.sdp_dump_dir)

        m = problem.constraint_count
        b = problem.b
        c = problem.c
        n_total = problem.order
        norm_b = float(np.linalg.norm(b))
        norm_c = float(np.sqrt(sum(np.sum(c_j**2) for c_j in c)))
        rows = [
            np.flatnonzero(np.any(a_j.reshape(m, -1) != 0, axis=1)) for a_j in problem.a
        ]

        x, y, s = self._starting_point(problem)
        status = SdpStatus.SLOW_PROGRESS
        best = None
        best_score = np.inf
        iteration = 0

        for iteration in range(1, max_iter + 1):
            rp = b - problem.apply(x)
            aty = problem.adjoint(y)
            rd = [c_j - s_j - aty_j for c_j, s_j, aty_j in zip(c, s, aty)]
            pobj = problem.objective(x)
            dobj = float(b @ y)
            pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
            dinf = float(np.sqrt(sum(np.sum(r**2) for r in rd))) / (1.0 + norm_c)
            rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj))
            mu = sum(float(np.sum(x_j * s_j)) for x_j, s_j in zip(x, s)) / n_total

            score = max(pinf / tol, dinf / tol, rel_gap / gap_tol)
            if score < best_score:
                best_score = score
                best = ([x_j.copy() for x_j in x], y.copy(), pinf, dinf, pobj, dobj)

            logger.debug(
                f"iter {iteration}: pobj={pobj:.10e} dobj={dobj:.10e} "
                f"pinf={pinf:.2e} dinf={dinf:.2e} mu={mu:.2e}"
            )

            if pinf <= tol and dinf <= tol and rel_gap <= gap_tol:
                status = SdpStatus.OPTIMAL
                break
            if dobj > bound and dinf <= tol:
                status = SdpStatus.PRIMAL_INFEASIBLE
                break
            if pobj < -bound and pinf <= tol:
                status = SdpStatus.DUAL_INFEASIBLE
                break

            try:
                s_inv = [linalg.cho_solve(linalg.cho_factor(s_j), np.eye(s_j.shape[0])) for s_j in s]
            except linalg.LinAlgError:
                logger.warning("Dual slack lost definiteness; stopping")
                break

            schur = np.zeros((m, m))
            for j, r_j in enumerate(rows):
                if r_j.size == 0:
                    continue
                a_sub = problem.a[j][r_j]
                t_sub = x[j] @ a_sub @ s_inv[j]
                schur[np.ix_(r_j, r_j)] += a_sub.reshape(r_j.size, -1) @ t_sub.reshape(
                    r_j.size, -1
                ).T
            schur = _sym(schur)

            try:
                factor = linalg.cho_factor(schur)

                def schur_solve(rhs):
                    return linalg.cho_solve(factor, rhs)

            except linalg.LinAlgError:
                logger.debug("Schur complement not positive definite; using least squares")

                def schur_solve(rhs):
                    return linalg.lstsq(schur, rhs)[0]

            def direction(sigma_mu, corrector=None):
                k = []
                for j in range(len(x)):
                    k_j = sigma_mu * s_inv[j] - x[j] - x[j] @ rd[j] @ s_inv[j]
                    if corrector is not None:
                        k_j = k_j - corrector[j] @ s_inv[j]
                    k.append(k_j)
                dy = schur_solve(rp - problem.apply(k))
                atdy = problem.adjoint(dy)
                ds = [rd_j - atdy_j for rd_j, atdy_j in zip(rd, atdy)]
                dx = [
                    _sym(k_j + x_j @ atdy_j @ s_inv_j)
                    for k_j, x_j, atdy_j, s_inv_j in zip(k, x, atdy, s_inv)
                ]
                return dx, dy, ds

            try:
                dx_a, dy_a, ds_a = direction(0.0)
                alpha_p = min(1.0, self._max_step(x, dx_a))
                alpha_d = min(1.0, self._max_step(s, ds_a))
                mu_aff = (
                    sum(
                        float(np.sum((x_j + alpha_p * dx_j) * (s_j + alpha_d * ds_j)))
                        for x_j, dx_j, s_j, ds_j in zip(x, dx_a, s, ds_a)
                    )
                    / n_total
                )
                sigma = min(1.0, max(0.0, mu_aff / mu) ** 3) if mu > 0 else 0.0
                corrector = [dx_j @ ds_j for dx_j, ds_j in zip(dx_a, ds_a)]
                dx, dy, ds = direction(sigma * mu, corrector)
                alpha_p = min(1.0, frac * self._max_step(x, dx))
                alpha_d = min(1.0, frac * self._max_step(s, ds))
            except np.linalg.LinAlgError:
                logger.warning("Iterate lost definiteness; stopping")
                break

            if alpha_p < 1e-10 and alpha_d < 1e-10:
                logger.warning(f"Step length collapsed at iteration {iteration}")
                break

            x = [_sym(x_j + alpha_p * dx_j) for x_j, dx_j in zip(x, dx)]
            y = y + alpha_d * dy
            s = [_sym(s_j + alpha_d * ds_j) for s_j, ds_j in zip(s, ds)]

        if status is SdpStatus.SLOW_PROGRESS and best is not None:
            x, y, pinf, dinf, pobj, dobj = best
        slack = [_sym(c_j - aty_j) for c_j, aty_j in zip(c, problem.adjoint(y))]
        solution = SdpSolution(
            x=x,
            y=y,
            s=slack,
            primal_objective=problem.objective(x),
            dual_objective=float(b @ y),
            primal_residual=float(np.linalg.norm(b - problem.apply(x))),
            dual_residual=dinf * (1.0 + norm_c),
            status=status,
            iterations=iteration,
        )
        log = logger.info if status is SdpStatus.OPTIMAL else logger.warning
        log(
            f"SDP ({m} constraints, blocks {list(problem.block_sizes)}) finished: "
            f"{status.value} after {iteration} iterations, "
            f"pobj={solution.primal_objective:.9f} dobj={solution.dual_objective:.9f}"
        )
        return solution


def validate_certificates(
    problem: SdpProblem,
    solution: SdpSolution,
    tol: Optional[float] = None,
    gap_tol: Optional[float] = None,
    psd_tol: Optional[float] = None,
) -> CertificateReport:
    """
    Recompute every optimality condition from scratch.

    Never trusts the numbers stored on the solution beyond X and y.

    Returns:
        CertificateReport listing each check with pass/fail
    """
    tol = tol if tol is not None else settings.sdp_feasibility_tol
    gap_tol = gap_tol if gap_tol is not None else settings.sdp_gap_tol
    psd_tol = psd_tol if psd_tol is not None else settings.psd_tol

    x, y = solution.x, solution.y
    norm_b = float(np.linalg.norm(problem.b))
    norm_c = float(np.sqrt(sum(np.sum(c_j**2) for c_j in problem.c)))
    residual = float(np.linalg.norm(problem.apply(x) - problem.b))
    slack = [c_j - aty_j for c_j, aty_j in zip(problem.c, problem.adjoint(y))]
    min_x = min(float(np.linalg.eigvalsh(_sym(x_j))[0]) for x_j in x)
    min_s = min(float(np.linalg.eigvalsh(_sym(s_j))[0]) for s_j in slack)
    slack_drift = float(
        np.sqrt(sum(np.sum((s_j - t_j) ** 2) for s_j, t_j in zip(solution.s, slack)))
    )
    pobj = problem.objective(x)
    dobj = float(problem.b @ y)
    complementarity = sum(float(np.sum(x_j * s_j)) for x_j, s_j in zip(x, slack))
    # the recomputed slack may sit a dual residual outside the cone
    dual_psd_tol = max(psd_tol, tol * (1 + norm_c))

    checks = (
        CertificateCheck("primal_feasibility", residual, tol * (1 + norm_b), residual <= tol * (1 + norm_b)),
        CertificateCheck("primal_psd", min_x, -psd_tol, min_x >= -psd_tol),
        CertificateCheck("dual_psd", min_s, -dual_psd_tol, min_s >= -dual_psd_tol),
        CertificateCheck("dual_slack", slack_drift, tol * (1 + norm_c), slack_drift <= tol * (1 + norm_c)),
        CertificateCheck(
            "primal_objective",
            abs(pobj - solution.primal_objective),
            1e-9 * (1 + abs(pobj)),
            abs(pobj - solution.primal_objective) <= 1e-9 * (1 + abs(pobj)),
        ),
        CertificateCheck(
            "dual_objective",
            abs(dobj - solution.dual_objective),
            1e-9 * (1 + abs(dobj)),
            abs(dobj - solution.dual_objective) <= 1e-9 * (1 + abs(dobj)),
        ),
        CertificateCheck(
            "duality_gap",
            abs(pobj - dobj),
            gap_tol * (1 + abs(pobj)),
            abs(pobj - dobj) <= gap_tol * (1 + abs(pobj)),
        ),
        CertificateCheck(
            "complementarity",
            complementarity,
            gap_tol * (1 + abs(pobj)),
            abs(complementarity) <= gap_tol * (1 + abs(pobj)),
        ),
    )
    return CertificateReport(checks)


def problem_to_payload(problem: SdpProblem):
    """Problem payload in the matrix JSON encoding."""
    return SdpProblemPayload(
        blocks=list(problem.block_sizes),
        c=[MatrixPayload.from_array(c_j) for c_j in problem.c],
        constraints=[
            ConstraintPayload(
                a=[MatrixPayload.from_array(a_j[i]) for a_j in problem.a],
                b=float(problem.b[i]),
            )
            for i in range(problem.constraint_count)
        ],
    )


def dump_problem(problem: SdpProblem, directory: str) -> Path:
    """Write a problem dump named by a content hash."""
    payload = problem_to_payload(problem).model_dump_json()
    digest = hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]
    path = Path(directory) / f"sdp_{digest}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload, encoding="utf-8")
    logger.info(f"Dumped SDP to {path}")
    return path


# Global solver instance
sdp_solver = InteriorPointSolver()


def solve(problem: SdpProblem, tol: Optional[float] = None, max_iter: Optional[int] = None) -> SdpSolution:
    """Solve with the global solver instance."""
    return sdp_solver.solve(problem, tol=tol, max_iter=max_iter)
