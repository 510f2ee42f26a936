"""
Quantum state service.

Named kets and families, partial transpose and trace, bipartition
enumeration and seeded random sampling. Party 0 is the most significant
digit of the computational-basis index.
"""

import itertools
import logging
import os
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import unitary_group

from ..models.state import Bipartition, DensityMatrix, Ket, StateError, StateFamily
from ..schemas.family import FamilyFilePayload
from .numerics import hermitize, psd_project, tensor_many

logger = logging.getLogger(__name__)

Cut = Union[Bipartition, Iterable[int]]


def _basis_ket(dims: Sequence[int], entries: dict) -> Ket:
    amplitudes = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    for index, value in entries.items():
        amplitudes[index] = value
    return Ket(amplitudes, tuple(dims))


def ket_ghz(n: int = 3) -> Ket:
    """(|0...0> + |1...1>) / sqrt(2) on n qubits."""
    amp = 1 / np.sqrt(2)
    return _basis_ket((2,) * n, {0: amp, 2**n - 1: amp})


def ket_w(n: int = 3) -> Ket:
    """Uniform superposition of the single-excitation basis states."""
    amp = 1 / np.sqrt(n)
    return _basis_ket((2,) * n, {2**k: amp for k in range(n)})


def ket_bell() -> Ket:
    """(|00> + |11>) / sqrt(2)."""
    return ket_ghz(2)


def ket_zero(n: int) -> Ket:
    """Product state |0...0>."""
    return _basis_ket((2,) * n, {0: 1.0})


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = int(np.prod(dims))
    return DensityMatrix(np.eye(d) / d, tuple(dims))


def mix(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination of states on the same subsystems."""
    if len(states) != len(weights) or not states:
        raise StateError("mix needs matching nonempty state and weight lists")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise StateError("Mixed states must share subsystem dimensions")
    matrix = sum(w * s.matrix for w, s in zip(weights, states))
    return DensityMatrix(hermitize(matrix), dims)


def ghz_w_family(q: float) -> DensityMatrix:
    """
    q |GHZ><GHZ| + (1 - q) |W><W| on three qubits.

    Raises:
        StateError: If q is outside [0, 1]
    """
    if not 0.0 <= q <= 1.0:
        raise StateError(f"q={q} outside [0, 1]")
    return mix([ket_ghz().projector(), ket_w().projector()], [q, 1.0 - q])


def white_noise_mix(rho: DensityMatrix, p: float) -> DensityMatrix:
    """
    p rho + (1 - p) I/d.

    Raises:
        StateError: If p is outside [0, 1]
    """
    if not 0.0 <= p <= 1.0:
        raise StateError(f"p={p} outside [0, 1]")
    return mix([rho, maximally_mixed(rho.dims)], [p, 1.0 - p])


def _cut_parties(cut: Cut, party_count: int) -> Tuple[int, ...]:
    if isinstance(cut, Bipartition):
        if cut.party_count != party_count:
            raise StateError(
                f"Cut {cut.label} is for {cut.party_count} parties, state has {party_count}"
            )
        return cut.members
    parties = tuple(sorted(set(int(p) for p in cut)))
    if any(p < 0 or p >= party_count for p in parties):
        raise StateError(f"Parties {parties} out of range for {party_count} parties")
    return parties


def partial_transpose_matrix(
    matrix: np.ndarray, dims: Sequence[int], cut: Cut
) -> np.ndarray:
    """
    Transpose the tensor factors listed in ``cut`` of any square matrix.

    Args:
        matrix: Operator on the product space with subsystem ``dims``
        dims: Subsystem dimensions
        cut: Bipartition or explicit list of transposed parties

    Returns:
        Partially transposed matrix of the same shape
    """
    dims = tuple(dims)
    n = len(dims)
    parties = _cut_parties(cut, n)
    d = int(np.prod(dims))
    if matrix.shape != (d, d):
        raise StateError(f"Matrix shape {matrix.shape} does not match dims {dims}")
    tensor = np.asarray(matrix).reshape(dims + dims)
    axes = list(range(2 * n))
    for p in parties:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    return tensor.transpose(axes).reshape(d, d)


def partial_transpose(rho: DensityMatrix, cut: Cut) -> np.ndarray:
    """Partial transpose of a state across ``cut`` (a Hermitian, possibly non-PSD matrix)."""
    return partial_transpose_matrix(rho.matrix, rho.dims, cut)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """
    Reduced state on the kept parties.

    Raises:
        StateError: If ``keep`` is empty or out of range
    """
    keep = tuple(sorted(set(int(p) for p in keep)))
    n = rho.party_count
    if not keep:
        raise StateError("partial_trace needs at least one kept party")
    if keep[0] < 0 or keep[-1] >= n:
        raise StateError(f"Kept parties {keep} out of range for {n} parties")
    traced = [p for p in range(n) if p not in keep]
    tensor = rho.matrix.reshape(rho.dims + rho.dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for p in traced:
        col[p] = row[p]
    out = "".join(row[p] for p in keep) + "".join(col[p] for p in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, tensor)
    kept_dims = tuple(rho.dims[p] for p in keep)
    d = int(np.prod(kept_dims))
    return DensityMatrix(hermitize(reduced.reshape(d, d)), kept_dims)


def enumerate_bipartitions(n: int) -> List[Bipartition]:
    """
    All 2^(n-1) - 1 canonical bipartitions of n parties.

    Ordered lexicographically on member tuples; members always contain party 0.

    Raises:
        StateError: If n < 2
    """
    if n < 2:
        raise StateError(f"Bipartitions need n >= 2 parties, got {n}")
    cuts = []
    others = range(1, n)
    for size in range(0, n - 1):
        for extra in itertools.combinations(others, size):
            cuts.append(Bipartition(n, (0,) + extra))
    return sorted(cuts, key=lambda cut: cut.members)


def set_partitions(items: Sequence[int], blocks: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """All partitions of ``items`` into exactly ``blocks`` nonempty groups."""
    items = list(items)
    if blocks < 1 or blocks > len(items):
        return []

    def _grow(index: int, groups: List[List[int]]):
        if index == len(items):
            if len(groups) == blocks:
                yield tuple(tuple(g) for g in groups)
            return
        remaining = len(items) - index
        if len(groups) + remaining < blocks:
            return
        for g in groups:
            g.append(items[index])
            yield from _grow(index + 1, groups)
            g.pop()
        if len(groups) < blocks:
            groups.append([items[index]])
            yield from _grow(index + 1, groups)
            groups.pop()

    return list(_grow(0, []))


def _rng(seed: Union[int, np.random.Generator, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_density(
    dim: int,
    rank: int,
    seed: Union[int, np.random.Generator, None],
    dims: Optional[Sequence[int]] = None,
) -> DensityMatrix:
    """
    Hilbert-Schmidt style random state G G^dagger / Tr(G G^dagger).

    Raises:
        StateError: If rank is outside [1, dim]
    """
    if not 1 <= rank <= dim:
        raise StateError(f"rank={rank} must lie in [1, {dim}]")
    dims = tuple(dims) if dims is not None else (dim,)
    if int(np.prod(dims)) != dim:
        raise StateError(f"dims {dims} do not multiply to {dim}")
    rng = _rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    matrix = g @ g.conj().T
    return DensityMatrix(hermitize(matrix / np.trace(matrix).real), dims)


def random_ket(dims: Sequence[int], seed: Union[int, np.random.Generator, None]) -> Ket:
    """Haar-random pure state."""
    rng = _rng(seed)
    d = int(np.prod(dims))
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return Ket(v / np.linalg.norm(v), tuple(dims))


def random_product_ket(
    dims: Sequence[int], seed: Union[int, np.random.Generator, None]
) -> Ket:
    """Tensor product of independent Haar-random kets, one per party."""
    rng = _rng(seed)
    factors = [random_ket((d,), rng).amplitudes for d in dims]
    v = tensor_many(factors)
    return Ket(v / np.linalg.norm(v), tuple(dims))


def random_separable_state(
    dims: Sequence[int], terms: int, seed: Union[int, np.random.Generator, None]
) -> DensityMatrix:
    """Random convex mixture of random fully product pure states."""
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    states = [random_product_ket(dims, rng).projector() for _ in range(terms)]
    return mix(states, list(weights))


def random_local_unitary(
    dims: Sequence[int], seed: Union[int, np.random.Generator, None]
) -> np.ndarray:
    """Tensor product of Haar-random unitaries, one per party."""
    rng = _rng(seed)
    return tensor_many([unitary_group.rvs(d, random_state=rng) for d in dims])


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    return DensityMatrix(hermitize(u @ rho.matrix @ u.conj().T), rho.dims)


def werner_family() -> StateFamily:
    """Bell projector mixed with white noise; q is the Bell weight."""
    bell = ket_bell().projector()
    return StateFamily("werner", lambda q: white_noise_mix(bell, q), bell.dims)


def ghz_w() -> StateFamily:
    return StateFamily("ghz-w", ghz_w_family, (2, 2, 2))


def constant_mixed_family(dims: Sequence[int] = (2, 2, 2)) -> StateFamily:
    state = maximally_mixed(dims)
    return StateFamily("constant-mixed", lambda q: state, tuple(dims))


def interpolated_family(
    name: str, samples: Sequence[Tuple[float, DensityMatrix]]
) -> StateFamily:
    """
    Family through listed (q, state) samples, linear between neighbours.

    Raises:
        StateError: If samples are unsorted, mismatched or do not span [0, 1]
    """
    samples = sorted(samples, key=lambda item: item[0])
    qs = [q for q, _ in samples]
    if len(samples) < 2 or qs[0] > 0.0 or qs[-1] < 1.0:
        raise StateError("Family samples must include q=0 and q=1")
    if len(set(qs)) != len(qs):
        raise StateError("Family samples have duplicate q values")
    dims = samples[0][1].dims
    if any(state.dims != dims for _, state in samples):
        raise StateError("Family samples must share subsystem dimensions")

    def generator(q: float) -> DensityMatrix:
        index = int(np.searchsorted(qs, q, side="right")) - 1
        index = min(max(index, 0), len(qs) - 2)
        q0, q1 = qs[index], qs[index + 1]
        t = (q - q0) / (q1 - q0)
        return mix([samples[index][1], samples[index + 1][1]], [1.0 - t, t])

    return StateFamily(name, generator, dims)


BUILTIN_FAMILIES = {
    "ghz-w": ghz_w,
    "werner": werner_family,
    "constant-mixed": constant_mixed_family,
}


def builtin_family(name: str) -> StateFamily:
    """
    Look up a named family.

    Raises:
        StateError: If the name is unknown
    """
    if name not in BUILTIN_FAMILIES:
        raise StateError(
            f"Unknown family '{name}', expected one of {sorted(BUILTIN_FAMILIES)}"
        )
    return BUILTIN_FAMILIES[name]()


def clean_state(matrix: np.ndarray, dims: Sequence[int]) -> DensityMatrix:
    """Clip tiny negative eigenvalues and renormalize into a valid state."""
    return DensityMatrix(psd_project(matrix, renormalize_trace=True), tuple(dims))


def file_family(path: Union[str, os.PathLike]) -> StateFamily:
    """
    Family read from a JSON file of (q, state) samples.

    Raises:
        StateError: If the samples do not form a valid family
    """
    with open(path, encoding="utf-8") as handle:
        payload = FamilyFilePayload.model_validate_json(handle.read())
    samples = [(s.q, s.state.to_state()) for s in payload.samples]
    logger.info(f"Loaded family {payload.name} with {len(samples)} samples from {path}")
    return interpolated_family(payload.name, samples)
