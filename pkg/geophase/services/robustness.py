"""
Robustness service.

Certified random and generalized robustness from a primal/dual pair of cone
programs, boundary states, and the seesaw bound for pure states.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Settings, settings
from ..models.robustness import (
    DualityGapError,
    PureLambda,
    Quantifier,
    RobustnessError,
    RobustnessResult,
    SolverStatusError,
    WitnessAuditError,
)
from ..models.state import DensityMatrix, Ket, StateError
from ..models.witness import ModelKind, Normalization, SeparabilityModel, Witness
from .numerics import NumericsError, hermitize, tensor_many
from .sdp_solver import InteriorPointSolver, sdp_solver
from .separability import (
    audit_witness,
    build_gr_dual,
    build_gr_primal,
    build_rr_dual,
    build_rr_primal,
    decomposition_violation,
    extract_witness,
    k_product_structures,
    membership_check,
    model_structures,
)
from .states import clean_state, random_ket, set_partitions

logger = logging.getLogger(__name__)


def boundary_state(
    rho: DensityMatrix, s: float, noise: Optional[DensityMatrix] = None
) -> DensityMatrix:
    """
    Return (rho + s * noise) / (1 + s); white noise by default.

    Raises:
        RobustnessError: If s < 0
        StateError: If the noise dims differ from rho
    """
    if s < 0:
        raise RobustnessError(f"Robustness value s={s} must be nonnegative")
    if noise is None:
        pi = np.eye(rho.dim) / rho.dim
    else:
        if noise.dims != rho.dims:
            raise StateError(f"Noise dims {noise.dims} do not match state dims {rho.dims}")
        pi = noise.matrix
    return DensityMatrix(hermitize((rho.matrix + s * pi) / (1.0 + s)), rho.dims)


def pure_state_witness(psi: Ket, lam: float) -> Witness:
    """
    W = lambda I - |psi><psi|, nonnegative on states whose overlap with psi is at most lambda.

    Raises:
        RobustnessError: If lambda is outside (0, 1]
    """
    if not 0.0 < lam <= 1.0:
        raise RobustnessError(f"Overlap bound {lam} outside (0, 1]")
    matrix = lam * np.eye(psi.dim) - np.outer(psi.amplitudes, psi.amplitudes.conj())
    return Witness(
        matrix=hermitize(matrix),
        normalization=Normalization.BOUNDED_BY_IDENTITY,
        dims=psi.dims,
        provenance="pure-overlap",
    )


def assemble_product(factors: Sequence[Ket], structure: Sequence[Sequence[int]], dims: Sequence[int]) -> Ket:
    """Product ket in natural party order from per-group factors."""
    dims = tuple(dims)
    order = [p for group in structure for p in group]
    vec = tensor_many([f.amplitudes for f in factors])
    tensor = vec.reshape([dims[p] for p in order]).transpose(np.argsort(order))
    return Ket(tensor.reshape(-1), dims)


class RobustnessService:
    """Service for certified robustness computations."""

    def __init__(self, config: Settings = settings, solver: InteriorPointSolver = sdp_solver):
        """Initialize the service with settings and a solver."""
        self.config = config
        self.solver = solver

    def _solve(self, program, what: str):
        solution = self.solver.solve(program.problem)
        if not solution.is_optimal:
            raise SolverStatusError(
                f"{what} ({program.label}) ended with status {solution.status.value}",
                solution.status,
            )
        return solution

    def _pair(self, rho, model, quantifier):
        if quantifier is Quantifier.RANDOM:
            primal, dual = build_rr_primal(rho, model), build_rr_dual(rho, model)
            normalization = Normalization.TRACE_D
        else:
            primal, dual = build_gr_primal(rho, model), build_gr_dual(rho, model)
            normalization = Normalization.BOUNDED_BY_IDENTITY

        primal_solution = self._solve(primal, "Primal program")
        dual_solution = self._solve(dual, "Witness program")
        primal_value = primal.objective_value(primal_solution)
        dual_value = -dual.objective_value(dual_solution)
        gap = abs(primal_value - dual_value)
        if gap > self.config.duality_gap_tol * (1.0 + abs(primal_value)):
            raise DualityGapError(
                f"Duality gap {gap:.3e} exceeds tolerance "
                f"(primal {primal_value:.9f}, dual {dual_value:.9f})"
            )
        witness = extract_witness(dual_solution, dual, model, normalization)
        return primal, primal_solution, primal_value, dual_value, gap, witness, dual_solution.status

    def _audit(self, witness: Witness, model: SeparabilityModel) -> None:
        if self.config.audit_samples <= 0:
            return
        report = audit_witness(witness, model_structures(model), self.config.audit_samples)
        if not report.passed:
            raise WitnessAuditError(
                f"Witness is negative ({report.min_value:.3e}) on a sampled member of {model.tag}"
            )

    def _check_boundary(
        self, sigma: DensityMatrix, model: SeparabilityModel, components: Tuple[np.ndarray, ...]
    ) -> None:
        if model.kind is ModelKind.MIXTURE_PPT:
            violation = decomposition_violation(sigma.matrix, components, model)
        else:
            violation = membership_check(sigma, model).violation
        if violation < -self.config.membership_tol:
            raise RobustnessError(
                f"Boundary state lies outside {model.tag} (violation {violation:.3e})"
            )

    def _clamp(self, raw: float, name: str, model: SeparabilityModel) -> Tuple[float, bool]:
        # values within separable_tol of zero are solver noise for both quantifiers
        if raw > self.config.separable_tol:
            return raw, False
        if raw < 0:
            logger.warning(f"{name} robustness {raw:.3e} clamped to 0 under {model.tag}")
        return 0.0, True

    def random_robustness(self, rho: DensityMatrix, model: SeparabilityModel) -> RobustnessResult:
        """
        Certified white-noise robustness of rho against the model.

        A state inside the model gets value 0 (clamped) and sigma* = rho.

        Raises:
            SolverStatusError: If either program is not solved to optimality
            DualityGapError: If the two bounds disagree
            CertificateError: If the witness certificate fails
            WitnessAuditError: If the witness fails the product-state audit
        """
        primal, solution, raw, dual_value, gap, witness, status = self._pair(
            rho, model, Quantifier.RANDOM
        )
        value, clamped = self._clamp(raw, "Random", model)

        d = rho.dim
        components: Tuple[np.ndarray, ...] = ()
        if model.kind is ModelKind.MIXTURE_PPT:
            values = primal.unpack(solution)
            shift = (value - raw) / (len(model.bipartitions) * d)
            components = tuple(
                hermitize((values[f"x[{cut.label}]"] + shift * np.eye(d)) / (1.0 + value))
                for cut in model.bipartitions
            )
        sigma = rho if clamped else boundary_state(rho, value)
        self._check_boundary(sigma, model, components)
        self._audit(witness, model)

        logger.info(f"RR[{model.tag}] = {value:.9f} (dual {dual_value:.9f}, gap {gap:.2e})")
        return RobustnessResult(
            quantifier=Quantifier.RANDOM,
            model=model.tag,
            value=value,
            dual_value=dual_value,
            gap=gap,
            witness=witness,
            boundary_state=sigma,
            optimal_noise=clean_state(np.eye(d) / d, rho.dims),
            status=status,
            clamped=clamped,
            components=components,
        )

    def generalized_robustness(self, rho: DensityMatrix, model: SeparabilityModel) -> RobustnessResult:
        """
        Certified generalized robustness with its optimal noise state.

        Raises:
            SolverStatusError: If either program is not solved to optimality
            DualityGapError: If the two bounds disagree
            CertificateError: If the witness certificate fails
            WitnessAuditError: If the witness fails the product-state audit
        """
        primal, solution, raw, dual_value, gap, witness, status = self._pair(
            rho, model, Quantifier.GENERALIZED
        )
        values = primal.unpack(solution)
        value, clamped = self._clamp(raw, "Generalized", model)
        pi = hermitize(values["pi"])
        weight = float(np.real(np.trace(pi)))

        noise = None
        if value > self.config.separable_tol:
            try:
                noise = clean_state(pi / weight, rho.dims)
            except (NumericsError, StateError) as e:
                raise RobustnessError(f"Optimal noise is not a valid state: {e}")
        # rho + Pi = sum_M X_M, so X_M / (1 + Tr Pi) decompose sigma*
        sigma = (
            DensityMatrix(hermitize((rho.matrix + pi) / (1.0 + weight)), rho.dims)
            if weight > 0
            else rho
        )
        components: Tuple[np.ndarray, ...] = ()
        if model.kind is ModelKind.MIXTURE_PPT:
            components = tuple(
                hermitize(values[f"x[{cut.label}]"] / (1.0 + max(weight, 0.0)))
                for cut in model.bipartitions
            )
        self._check_boundary(sigma, model, components)
        self._audit(witness, model)

        logger.info(f"GR[{model.tag}] = {value:.9f} (dual {dual_value:.9f}, gap {gap:.2e})")
        return RobustnessResult(
            quantifier=Quantifier.GENERALIZED,
            model=model.tag,
            value=value,
            dual_value=dual_value,
            gap=gap,
            witness=witness,
            boundary_state=sigma,
            optimal_noise=noise,
            status=status,
            clamped=clamped,
            components=components,
        )

    def compute(
        self, rho: DensityMatrix, model: SeparabilityModel, quantifier: Quantifier
    ) -> RobustnessResult:
        """Dispatch on the quantifier."""
        if quantifier is Quantifier.RANDOM:
            return self.random_robustness(rho, model)
        return self.generalized_robustness(rho, model)

    # Pure states

    def _seesaw_run(
        self,
        tensor: np.ndarray,
        group_dims: List[int],
        rng: np.random.Generator,
    ) -> Tuple[float, List[np.ndarray], List[float]]:
        factors = [random_ket((dg,), rng).amplitudes.copy() for dg in group_dims]
        history: List[float] = []
        previous = -1.0
        overlap = 0.0
        for _ in range(self.config.seesaw_max_sweeps):
            for j in range(len(factors)):
                v = tensor
                for i in sorted((i for i in range(len(factors)) if i != j), reverse=True):
                    v = np.tensordot(v, factors[i].conj(), axes=([i], [0]))
                norm = float(np.linalg.norm(v))
                if norm > 0:
                    factors[j] = v / norm
                overlap = min(norm**2, 1.0)
                history.append(overlap)
            if overlap - previous < self.config.seesaw_tol:
                break
            previous = overlap
        return overlap, factors, history

    def pure_lambda_seesaw(
        self,
        psi: Ket,
        k: Optional[int] = None,
        structures: Optional[Iterable[Sequence[Sequence[int]]]] = None,
        restarts: Optional[int] = None,
        seed: int = 0,
    ) -> PureLambda:
        """
        Lower bound on the largest squared overlap of psi with k-product states.

        Each sweep updates one factor to the normalized contraction of psi
        with the others, so the overlap never decreases. Restarts are Haar
        random; every k-block set partition is tried.

        Args:
            psi: Pure state
            k: Number of product blocks (default: fully product)
            structures: Explicit block structures, overriding k
            restarts: Restarts per structure
            seed: RNG seed

        Raises:
            RobustnessError: If no valid structure is given
        """
        n = len(psi.dims)
        restarts = restarts if restarts is not None else self.config.seesaw_restarts
        if structures is None:
            structures = set_partitions(range(n), k if k is not None else n)
        structures = [tuple(tuple(g) for g in s) for s in structures]
        if not structures or restarts < 1:
            raise RobustnessError(f"No product structure to optimize (k={k}, n={n})")

        rng = np.random.default_rng(seed)
        best: Optional[PureLambda] = None
        for structure in structures:
            parties = sorted(p for g in structure for p in g)
            if parties != list(range(n)):
                raise RobustnessError(f"Structure {structure} is not a partition of {n} parties")
            order = [p for g in structure for p in g]
            group_dims = [int(np.prod([psi.dims[p] for p in g])) for g in structure]
            tensor = psi.amplitudes.reshape(psi.dims).transpose(order).reshape(group_dims)
            for _ in range(restarts):
                overlap, factors, history = self._seesaw_run(tensor, group_dims, rng)
                if best is None or overlap > best.value:
                    best = PureLambda(
                        value=overlap,
                        factors=tuple(
                            Ket(f / np.linalg.norm(f), tuple(psi.dims[p] for p in g))
                            for f, g in zip(factors, structure)
                        ),
                        structure=structure,
                        restarts_used=0,
                        history=tuple(history),
                    )
        assert best is not None
        logger.info(f"Seesaw overlap bound {best.value:.12f} with blocks {best.structure}")
        return PureLambda(
            value=best.value,
            factors=best.factors,
            structure=best.structure,
            restarts_used=restarts * len(structures),
            history=best.history,
        )

    def audited_pure_witness(
        self, psi: Ket, k: Optional[int] = None, restarts: Optional[int] = None, seed: int = 0
    ) -> Tuple[Witness, PureLambda]:
        """
        Seesaw witness lambda I - |psi><psi| checked on random k-product states.

        Raises:
            WitnessAuditError: If the seesaw underestimated lambda
        """
        n = len(psi.dims)
        k = k if k is not None else n
        pure = self.pure_lambda_seesaw(psi, k=k, restarts=restarts, seed=seed)
        witness = pure_state_witness(psi, pure.value)
        if self.config.audit_samples <= 0:
            return witness, pure
        report = audit_witness(
            witness, k_product_structures(n, k), self.config.audit_samples, seed=seed + 1
        )
        if not report.passed:
            raise WitnessAuditError(
                f"Seesaw bound {pure.value:.12f} is too small (audit min {report.min_value:.3e})"
            )
        return witness, pure


# Global service instance
robustness_service = RobustnessService()
