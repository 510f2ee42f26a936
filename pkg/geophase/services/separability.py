"""
Separability models and the robustness/witness cone programs built on them.

Every program here is a ConeProgram; primal programs bound the robustness
from above, dual (witness) programs bound it from below with a witness whose
dual-cone decomposition is returned alongside.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..models.sdp import SdpSolution
from ..models.state import Bipartition, DensityMatrix
from ..models.witness import (
    CertificateError,
    CertificateMode,
    Membership,
    ModelKind,
    Normalization,
    SeparabilityError,
    SeparabilityModel,
    Witness,
    WitnessCertificate,
)
from .cone_programs import ConeProgram, Term
from .numerics import hermitize, min_eigenvalue
from .sdp_solver import solve
from .states import enumerate_bipartitions, partial_transpose_matrix, set_partitions

logger = logging.getLogger(__name__)

Structure = Tuple[Tuple[int, ...], ...]


def make_model(kind: ModelKind, dims: Sequence[int]) -> SeparabilityModel:
    """Model of the given kind over every bipartition of ``dims``."""
    dims = tuple(dims)
    return SeparabilityModel(kind, dims, tuple(enumerate_bipartitions(len(dims))))


def model_for_k(dims: Sequence[int], k: int) -> SeparabilityModel:
    """
    Pick the relaxation used for k-separability.

    Two parties of size 2x2 or 2x3 use the exact PPT set; otherwise k = n
    maps to the PPT intersection and k = 2 to the PPT mixture.

    Raises:
        SeparabilityError: For any other k
    """
    dims = tuple(dims)
    n = len(dims)
    if n < 2:
        raise SeparabilityError("Separability needs at least two parties")
    if n == 2 and k == 2 and sorted(dims) in ([2, 2], [2, 3]):
        return make_model(ModelKind.EXACT_TWO_QUBIT, dims)
    if k == n:
        return make_model(ModelKind.INTERSECT_PPT, dims)
    if k == 2:
        return make_model(ModelKind.MIXTURE_PPT, dims)
    raise SeparabilityError(
        f"No relaxation for k={k} with {n} parties (supported: k=2 and k={n})"
    )


def _check_dims(rho: DensityMatrix, model: SeparabilityModel) -> None:
    if rho.dims != model.dims:
        raise SeparabilityError(f"State dims {rho.dims} do not match model dims {model.dims}")


def _pt(matrix: np.ndarray, model: SeparabilityModel, cut: Bipartition) -> np.ndarray:
    return partial_transpose_matrix(matrix, model.dims, cut)


def _certificate_mode(model: SeparabilityModel) -> CertificateMode:
    if model.kind is ModelKind.MIXTURE_PPT:
        return CertificateMode.PER_PARTITION
    return CertificateMode.SUMMED


# Primal programs


def build_rr_primal(rho: DensityMatrix, model: SeparabilityModel) -> ConeProgram:
    """
    Smallest s with (rho + s I/d)/(1 + s) in the model.

    Solved in t = 1 + s >= 0, so the program is feasible for every state.
    """
    _check_dims(rho, model)
    d = rho.dim
    noise = np.eye(d) / d
    prog = ConeProgram(model.dims, label=f"rr-primal/{model.tag}")
    t = prog.scalar("t")
    if model.kind is ModelKind.MIXTURE_PPT:
        xs = [prog.hermitian(f"x[{cut.label}]") for cut in model.bipartitions]
        prog.add_matrix_constraint(
            [Term(x) for x in xs] + [Term(t, matrix=-noise)], rho.matrix - noise
        )
        for cut, x in zip(model.bipartitions, xs):
            z = prog.hermitian(f"z[{cut.label}]")
            prog.add_matrix_constraint([Term(z), Term(x, -1.0, cut)], np.zeros((d, d)))
    else:
        y0 = prog.hermitian("y[0]")
        prog.add_matrix_constraint([Term(y0), Term(t, matrix=-noise)], rho.matrix - noise)
        for cut in model.bipartitions:
            y = prog.hermitian(f"y[{cut.label}]")
            prog.add_matrix_constraint(
                [Term(y), Term(t, matrix=-noise)], _pt(rho.matrix, model, cut) - noise
            )
    prog.set_objective({t: 1.0}, offset=-1.0)
    return prog


def build_gr_primal(rho: DensityMatrix, model: SeparabilityModel) -> ConeProgram:
    """Smallest Tr(Pi) over PSD Pi with rho + Pi in the model cone."""
    _check_dims(rho, model)
    d = rho.dim
    prog = ConeProgram(model.dims, label=f"gr-primal/{model.tag}")
    pi = prog.hermitian("pi")
    if model.kind is ModelKind.MIXTURE_PPT:
        xs = [prog.hermitian(f"x[{cut.label}]") for cut in model.bipartitions]
        prog.add_matrix_constraint([Term(x) for x in xs] + [Term(pi, -1.0)], rho.matrix)
        for cut, x in zip(model.bipartitions, xs):
            z = prog.hermitian(f"z[{cut.label}]")
            prog.add_matrix_constraint([Term(z), Term(x, -1.0, cut)], np.zeros((d, d)))
    else:
        y0 = prog.hermitian("y[0]")
        prog.add_matrix_constraint([Term(y0), Term(pi, -1.0)], rho.matrix)
        for cut in model.bipartitions:
            y = prog.hermitian(f"y[{cut.label}]")
            prog.add_matrix_constraint(
                [Term(y), Term(pi, -1.0, cut)], _pt(rho.matrix, model, cut)
            )
    prog.set_objective({pi: np.eye(d)})
    return prog


# Witness programs


def _witness_variables(prog: ConeProgram, model: SeparabilityModel) -> Dict[str, List[str]]:
    """Declare the P/Q variables and the constraints tying them into one W."""
    cuts = model.bipartitions
    d = model.dim
    if _certificate_mode(model) is CertificateMode.SUMMED:
        ps = [prog.hermitian("p")]
        qs = [prog.hermitian(f"q[{cut.label}]") for cut in cuts]
        return {"p": ps, "q": qs}

    ps = [prog.hermitian(f"p[{cut.label}]") for cut in cuts]
    qs = [prog.hermitian(f"q[{cut.label}]") for cut in cuts]
    first = cuts[0]
    for cut, p, q in list(zip(cuts, ps, qs))[1:]:
        prog.add_matrix_constraint(
            [Term(p), Term(q, 1.0, cut), Term(ps[0], -1.0), Term(qs[0], -1.0, first)],
            np.zeros((d, d)),
        )
    return {"p": ps, "q": qs}


def _witness_terms(model: SeparabilityModel, names: Dict[str, List[str]]) -> List[Term]:
    """Terms whose sum is the witness W."""
    cuts = model.bipartitions
    if _certificate_mode(model) is CertificateMode.SUMMED:
        return [Term(names["p"][0])] + [Term(q, 1.0, cut) for cut, q in zip(cuts, names["q"])]
    return [Term(names["p"][0]), Term(names["q"][0], 1.0, cuts[0])]


def _witness_objective(
    rho: DensityMatrix, model: SeparabilityModel, names: Dict[str, List[str]]
) -> Dict[str, np.ndarray]:
    """Tr(W rho) spread over the terms of W."""
    objective = {}
    for term in _witness_terms(model, names):
        coef = rho.matrix if term.transpose is None else _pt(rho.matrix, model, term.transpose)
        objective[term.var] = coef
    return objective


def build_rr_dual(rho: DensityMatrix, model: SeparabilityModel) -> ConeProgram:
    """
    Minimize Tr(W rho) over dual-cone W with Tr W = d.

    The robustness lower bound is minus the optimal value.
    """
    _check_dims(rho, model)
    d = rho.dim
    prog = ConeProgram(model.dims, label=f"rr-dual/{model.tag}")
    names = _witness_variables(prog, model)
    if _certificate_mode(model) is CertificateMode.SUMMED:
        trace_terms = {v: np.eye(d) for v in names["p"] + names["q"]}
    else:
        trace_terms = {names["p"][0]: np.eye(d), names["q"][0]: np.eye(d)}
    prog.add_scalar_constraint(trace_terms, float(d))
    prog.set_objective(_witness_objective(rho, model, names))
    return prog


def build_gr_dual(rho: DensityMatrix, model: SeparabilityModel) -> ConeProgram:
    """Minimize Tr(W rho) over dual-cone W with W <= I."""
    _check_dims(rho, model)
    d = rho.dim
    prog = ConeProgram(model.dims, label=f"gr-dual/{model.tag}")
    names = _witness_variables(prog, model)
    slack = prog.hermitian("slack")
    prog.add_matrix_constraint([Term(slack)] + _witness_terms(model, names), np.eye(d))
    prog.set_objective(_witness_objective(rho, model, names))
    return prog


# Witness extraction


def _scale_certificate(cert: WitnessCertificate, factor: float) -> WitnessCertificate:
    return WitnessCertificate(
        cert.mode,
        cert.bipartitions,
        tuple(factor * p for p in cert.p),
        tuple(factor * q for q in cert.q),
    )


def reconstruct_witness(cert: WitnessCertificate, dims: Sequence[int]) -> List[np.ndarray]:
    """Every W the certificate claims: one per cut (PER_PARTITION) or one sum (SUMMED)."""
    if cert.mode is CertificateMode.SUMMED:
        total = cert.p[0].copy()
        for cut, q in zip(cert.bipartitions, cert.q):
            total = total + partial_transpose_matrix(q, dims, cut)
        return [total]
    return [
        p + partial_transpose_matrix(q, dims, cut)
        for cut, p, q in zip(cert.bipartitions, cert.p, cert.q)
    ]


def verify_certificate(witness: Witness, tol: Optional[float] = None, psd_tol: Optional[float] = None) -> float:
    """
    Re-check a witness certificate independently of the solver.

    Returns:
        Largest reconstruction residual

    Raises:
        CertificateError: If a component is not PSD or W is not reproduced
    """
    tol = tol if tol is not None else settings.certificate_tol
    psd_tol = psd_tol if psd_tol is not None else settings.psd_tol
    cert = witness.certificate
    if cert is None:
        raise CertificateError("Witness carries no certificate")
    for component in cert.p + cert.q:
        eig = min_eigenvalue(component)
        if eig < -psd_tol:
            raise CertificateError(f"Certificate component has eigenvalue {eig:.3e}")
    scale = 1.0 + float(np.linalg.norm(witness.matrix))
    residual = max(
        float(np.linalg.norm(w - witness.matrix)) for w in reconstruct_witness(cert, witness.dims)
    )
    if residual > tol * scale:
        raise CertificateError(f"Certificate reproduces W only to {residual:.3e}")
    return residual


def extract_witness(
    solution: SdpSolution,
    program: ConeProgram,
    model: SeparabilityModel,
    normalization: Normalization,
) -> Witness:
    """
    Assemble W and its certificate from an optimal witness-program solution.

    Small normalization drift is removed by a positive rescaling, which
    keeps the certificate valid.

    Raises:
        SeparabilityError: If the solution is not optimal
        CertificateError: If the certificate or normalization fails
    """
    if not solution.is_optimal:
        raise SeparabilityError(f"Cannot extract a witness from a {solution.status.value} solve")
    values = program.unpack(solution)
    cuts = model.bipartitions
    mode = _certificate_mode(model)
    if mode is CertificateMode.SUMMED:
        p = (hermitize(values["p"]),)
    else:
        p = tuple(hermitize(values[f"p[{cut.label}]"]) for cut in cuts)
    q = tuple(hermitize(values[f"q[{cut.label}]"]) for cut in cuts)
    cert = WitnessCertificate(mode, cuts, p, q)
    matrix = hermitize(reconstruct_witness(cert, model.dims)[0])

    d = model.dim
    if normalization is Normalization.TRACE_D:
        trace = float(np.real(np.trace(matrix)))
        if trace <= 0:
            raise CertificateError(f"Witness trace {trace:.3e} is not positive")
        factor = d / trace
    else:
        lam_max = float(np.linalg.eigvalsh(matrix)[-1])
        factor = 1.0 / lam_max if lam_max > 1.0 else 1.0
    if abs(factor - 1.0) > settings.membership_tol:
        raise CertificateError(f"Witness normalization is off by factor {factor:.6f}")

    witness = Witness(
        matrix=hermitize(factor * matrix),
        normalization=normalization,
        dims=model.dims,
        certificate=_scale_certificate(cert, factor),
        model=model.tag,
    )
    verify_certificate(witness)
    return witness


# Membership


def ppt_violation(matrix: np.ndarray, model: SeparabilityModel) -> float:
    """Most negative eigenvalue of the matrix and all its partial transposes."""
    values = [min_eigenvalue(matrix)]
    values += [min_eigenvalue(_pt(matrix, model, cut)) for cut in model.bipartitions]
    return min(values)


def decomposition_violation(
    target: np.ndarray, components: Sequence[np.ndarray], model: SeparabilityModel
) -> float:
    """
    Violation of a claimed PPT-mixture decomposition target = sum_M X_M.

    Returns the most negative eigenvalue over X_M and X_M^{T_M}, or minus the
    reconstruction residual if that is worse.
    """
    if len(components) != len(model.bipartitions):
        raise SeparabilityError("Decomposition needs one component per cut")
    residual = float(np.linalg.norm(np.sum(components, axis=0) - target))
    values = [-residual]
    for cut, x in zip(model.bipartitions, components):
        values.append(min_eigenvalue(x))
        values.append(min_eigenvalue(_pt(x, model, cut)))
    return min(values)


def membership_check(
    sigma: DensityMatrix, model: SeparabilityModel, tol: Optional[float] = None
) -> Membership:
    """
    Test whether sigma lies in the model.

    PPT-intersection models use eigenvalues directly; the PPT mixture solves
    the random-robustness program, with violation -s/d.
    """
    _check_dims(sigma, model)
    tol = tol if tol is not None else settings.membership_tol
    if model.kind is ModelKind.MIXTURE_PPT:
        program = build_rr_primal(sigma, model)
        solution = solve(program.problem)
        if not solution.is_optimal:
            raise SeparabilityError(f"Membership solve ended {solution.status.value}")
        violation = -program.objective_value(solution) / sigma.dim
    else:
        violation = ppt_violation(sigma.matrix, model)
    return Membership(inside=violation >= -tol, violation=float(violation))


# Witness audit


@dataclass(frozen=True)
class AuditReport:
    """Minimum of Tr(W sigma) over sampled product members."""

    min_value: float
    samples: int
    passed: bool


def model_structures(model: SeparabilityModel) -> List[Structure]:
    """Product structures whose pure states are extreme points of the true set."""
    n = model.party_count
    if model.kind is ModelKind.MIXTURE_PPT:
        return [(cut.members, cut.complement) for cut in model.bipartitions]
    return [tuple((p,) for p in range(n))]


def k_product_structures(party_count: int, k: int) -> List[Structure]:
    return set_partitions(range(party_count), k)


def _haar_vectors(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    v = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_product_kets(
    dims: Sequence[int],
    structures: Sequence[Structure],
    samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Haar product kets, each over a uniformly chosen structure.

    Returns:
        Array of shape (samples, d), rows in natural party order
    """
    dims = tuple(dims)
    if not dims or not structures:
        raise SeparabilityError("Nothing to sample")
    d = int(np.prod(dims))
    choice = rng.integers(len(structures), size=samples)
    out = np.empty((samples, d), dtype=np.complex128)
    for index, structure in enumerate(structures):
        rows = np.flatnonzero(choice == index)
        if rows.size == 0:
            continue
        vec = np.ones((rows.size, 1), dtype=np.complex128)
        order = []
        for group in structure:
            dg = int(np.prod([dims[p] for p in group]))
            factor = _haar_vectors(rng, rows.size, dg)
            vec = (vec[:, :, None] * factor[:, None, :]).reshape(rows.size, -1)
            order.extend(group)
        tensor = vec.reshape((rows.size,) + tuple(dims[p] for p in order))
        inverse = np.argsort(order)
        tensor = tensor.transpose([0] + [1 + int(i) for i in inverse])
        out[rows] = tensor.reshape(rows.size, d)
    return out


def audit_witness(
    witness: Witness,
    structures: Sequence[Structure],
    samples: Optional[int] = None,
    seed: int = 0,
    tol: Optional[float] = None,
) -> AuditReport:
    """Monte Carlo check that W is nonnegative on random product pure states."""
    samples = samples if samples is not None else settings.audit_samples
    tol = tol if tol is not None else settings.audit_tol
    rng = np.random.default_rng(seed)
    kets = sample_product_kets(witness.dims, structures, samples, rng)
    values = np.einsum("ki,ij,kj->k", kets.conj(), witness.matrix, kets).real
    min_value = float(np.min(values))
    passed = min_value >= -tol
    if not passed:
        logger.warning(f"Witness audit failed: min Tr(W sigma) = {min_value:.3e}")
    return AuditReport(min_value=min_value, samples=samples, passed=passed)
