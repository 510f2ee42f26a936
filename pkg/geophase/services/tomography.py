"""
Tomography simulation service.

Full local-Pauli tomography of qubit systems with multinomial shot noise,
linear-inversion reconstruction and Pauli-basis witness estimation.
Outcome bit 0 is the +1 eigenvalue; qubit 0 is the most significant bit.
"""

import asyncio
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import Settings, settings
from ..models.robustness import Quantifier
from ..models.state import DensityMatrix, StateFamily
from ..models.tomography import (
    PAULI_AXES,
    CountsRecord,
    ExperimentRow,
    MeasurementSetting,
    PauliExpectations,
    ReconstructionResult,
    TomographyError,
    WitnessEstimate,
)
from ..models.witness import SeparabilityModel, Witness
from ..schemas.tomography import CountsRecordPayload
from .export import atomic_write_text
from .numerics import fidelity, hermitize, psd_project, tensor_many
from .robustness import RobustnessService, robustness_service
from .scan import uniform_grid
from .separability import model_for_k

logger = logging.getLogger(__name__)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_S_DAGGER = np.array([[1, 0], [0, -1j]], dtype=np.complex128)

# Rotations taking each axis's eigenbasis to the computational basis
BASIS_ROTATIONS = {
    "Z": np.eye(2, dtype=np.complex128),
    "X": _HADAMARD,
    "Y": _HADAMARD @ _S_DAGGER,
}


def _check_qubits(dims: Sequence[int]) -> int:
    if not dims or any(d != 2 for d in dims):
        raise TomographyError(f"Tomography needs qubits, got dims {tuple(dims)}")
    return len(dims)


def all_settings(qubit_count: int) -> List[MeasurementSetting]:
    """The 3^n local Pauli settings in lexicographic X < Y < Z order."""
    return [MeasurementSetting(axes) for axes in itertools.product(PAULI_AXES, repeat=qubit_count)]


def pauli_labels(qubit_count: int) -> List[str]:
    return ["".join(p) for p in itertools.product("IXYZ", repeat=qubit_count)]


def pauli_string_matrix(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"XIZ"``."""
    try:
        return tensor_many([PAULI_MATRICES[c] for c in label.upper()])
    except KeyError:
        raise TomographyError(f"Invalid Pauli string '{label}'")


def pauli_coefficients(matrix: np.ndarray, qubit_count: int) -> Dict[str, float]:
    """Real coefficients c_P with M = sum_P c_P P for Hermitian M."""
    scale = 2**qubit_count
    return {
        label: float(np.real(np.sum(matrix * pauli_string_matrix(label).T))) / scale
        for label in pauli_labels(qubit_count)
    }


def compatible_setting(label: str) -> str:
    """Setting measuring a Pauli string: identity positions read out in Z."""
    return "".join("Z" if c == "I" else c for c in label.upper())


def outcome_probabilities(rho: DensityMatrix, setting: MeasurementSetting) -> np.ndarray:
    n = _check_qubits(rho.dims)
    if setting.qubit_count != n:
        raise TomographyError(f"Setting {setting.label} does not match {n} qubits")
    u = tensor_many([BASIS_ROTATIONS[a] for a in setting.axes])
    probabilities = np.real(np.diag(u @ rho.matrix @ u.conj().T))
    probabilities = np.clip(probabilities, 0.0, None)
    return probabilities / probabilities.sum()


def simulate_counts(
    rho: DensityMatrix,
    setting: MeasurementSetting,
    shots: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> CountsRecord:
    """
    Sample outcome counts of one setting; ``shots == 0`` returns exact probabilities.

    Raises:
        TomographyError: For non-qubit systems or negative shots
    """
    if shots < 0:
        raise TomographyError(f"shots must be >= 0, got {shots}")
    probabilities = outcome_probabilities(rho, setting)
    if shots == 0:
        return CountsRecord(setting, 0, probabilities)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return CountsRecord(setting, shots, rng.multinomial(shots, probabilities))


def measure_all(rho: DensityMatrix, shots: int, seed: Optional[int] = None) -> List[CountsRecord]:
    """Every local Pauli setting with equal shots, drawn from one seeded stream."""
    n = _check_qubits(rho.dims)
    rng = np.random.default_rng(seed)
    return [simulate_counts(rho, setting, shots, rng) for setting in all_settings(n)]


def _outcome_signs(qubit_count: int, label: str) -> np.ndarray:
    outcomes = np.arange(2**qubit_count)
    signs = np.ones(outcomes.size)
    for k, c in enumerate(label):
        if c != "I":
            bits = (outcomes >> (qubit_count - 1 - k)) & 1
            signs = signs * (1 - 2 * bits)
    return signs


def estimate_pauli_expectations(
    records: Sequence[CountsRecord], labels: Optional[Sequence[str]] = None
) -> PauliExpectations:
    """
    Parity estimates of Pauli-string expectations with binomial standard errors.

    Args:
        records: Counts records, one per setting (repeats are pooled)
        labels: Pauli strings to estimate (default: all 4^n)

    Raises:
        TomographyError: If a requested string has no compatible record
    """
    if not records:
        raise TomographyError("No counts records")
    n = records[0].setting.qubit_count
    shots = records[0].shots
    pooled: Dict[str, Tuple[np.ndarray, int]] = {}
    for record in records:
        if record.setting.qubit_count != n or record.exact != (shots == 0):
            raise TomographyError("Records mix qubit counts or exact and sampled modes")
        label = record.setting.label
        if label in pooled and not record.exact:
            counts, total = pooled[label]
            pooled[label] = (counts + record.counts, total + record.shots)
        elif label not in pooled:
            pooled[label] = (record.counts.astype(float), record.shots)

    values: Dict[str, float] = {}
    stderrs: Dict[str, float] = {}
    for label in labels or pauli_labels(n):
        label = label.upper()
        if len(label) != n:
            raise TomographyError(f"Pauli string '{label}' is not on {n} qubits")
        if set(label) == {"I"}:
            values[label], stderrs[label] = 1.0, 0.0
            continue
        setting = compatible_setting(label)
        if setting not in pooled:
            raise TomographyError(f"No record compatible with '{label}' (needs {setting})")
        counts, total = pooled[setting]
        frequencies = counts if total == 0 else counts / total
        estimate = float(np.dot(frequencies, _outcome_signs(n, label)))
        values[label] = estimate
        stderrs[label] = 0.0 if total == 0 else float(np.sqrt(max(0.0, 1.0 - estimate**2) / total))
    return PauliExpectations(qubit_count=n, values=values, stderrs=stderrs, shots=shots)


def reconstruct(
    expectations: PauliExpectations, target: Optional[DensityMatrix] = None
) -> ReconstructionResult:
    """
    Linear inversion followed by eigenvalue clipping and trace renormalization.

    Raises:
        TomographyError: If the expectation table is incomplete
    """
    n = expectations.qubit_count
    labels = pauli_labels(n)
    missing = [label for label in labels if label not in expectations.values]
    if missing:
        raise TomographyError(f"Expectation table misses {len(missing)} strings, e.g. {missing[0]}")
    d = 2**n
    raw = sum(expectations.values[label] * pauli_string_matrix(label) for label in labels) / d
    raw = hermitize(raw)
    estimate = DensityMatrix(psd_project(raw, renormalize_trace=True), (2,) * n)
    return ReconstructionResult(
        estimate=estimate,
        raw=raw,
        fidelity=fidelity(target.matrix, estimate.matrix) if target is not None else None,
        total_shots=expectations.shots * 3**n,
    )


def witness_expectation(
    source: Union[PauliExpectations, DensityMatrix], witness: Witness
) -> WitnessEstimate:
    """
    Estimate Tr(W rho) from a Pauli table (with uncorrelated error propagation)
    or directly from a reconstructed state (no error bar).

    Raises:
        TomographyError: If a needed expectation is missing
    """
    if isinstance(source, DensityMatrix):
        value = witness.expectation(source.matrix)
        return WitnessEstimate(estimate=value, stderr=0.0, detected=value < 0)

    n = source.qubit_count
    if witness.dim != 2**n:
        raise TomographyError(f"Witness dimension {witness.dim} does not match {n} qubits")
    estimate = 0.0
    variance = 0.0
    for label, coefficient in pauli_coefficients(witness.matrix, n).items():
        if abs(coefficient) < 1e-14:
            continue
        if label not in source.values:
            raise TomographyError(f"Missing expectation for '{label}'")
        estimate += coefficient * source.values[label]
        variance += (coefficient * source.stderrs.get(label, 0.0)) ** 2
    stderr = float(np.sqrt(variance))
    return WitnessEstimate(estimate=estimate, stderr=stderr, detected=estimate + stderr < 0)


def error_scaling(
    rho: DensityMatrix,
    witness: Witness,
    shot_counts: Sequence[int],
    seeds: Sequence[int],
) -> Tuple[List[float], float]:
    """
    Mean absolute witness-estimate error per shot count and its log-log slope.

    Returns:
        (mean errors, fitted slope of log error against log N)
    """
    exact = witness.expectation(rho.matrix)
    errors = []
    for shots in shot_counts:
        if shots <= 0:
            raise TomographyError("error_scaling needs positive shot counts")
        deviations = [
            abs(witness_expectation(estimate_pauli_expectations(measure_all(rho, shots, s)), witness).estimate - exact)
            for s in seeds
        ]
        errors.append(float(np.mean(deviations)))
    slope = float(np.polyfit(np.log(shot_counts), np.log(errors), 1)[0])
    return errors, slope


class TomographyService:
    """Service for simulated tomography experiments along a family."""

    def __init__(self, config: Settings = settings, robustness: RobustnessService = robustness_service):
        """Initialize the tomography service."""
        self.config = config
        self.robustness = robustness

    def run_point(
        self,
        family: StateFamily,
        q: float,
        shots: int,
        seed: int,
        quantifier: Quantifier,
        model: SeparabilityModel,
    ) -> ExperimentRow:
        """Measure rho(q), reconstruct, fit the optimal witness on the estimate, and evaluate it."""
        rho = family(q)
        expectations = estimate_pauli_expectations(measure_all(rho, shots, seed))
        reconstruction = reconstruct(expectations)
        fitted = self.robustness.compute(reconstruction.estimate, model, quantifier)
        measured = witness_expectation(expectations, fitted.witness)
        truth = self.robustness.compute(rho, model, quantifier).value

        notes: Tuple[str, ...] = ()
        estimate = -measured.estimate
        if fitted.clamped:
            estimate = 0.0
            notes = ("reconstruction inside model",)
        return ExperimentRow(
            q=q,
            estimate=estimate,
            stderr=measured.stderr,
            truth=truth,
            shots=shots,
            seed=seed,
            detected=measured.detected and not fitted.clamped,
            notes=notes,
        )

    async def end_to_end_experiment_async(
        self,
        family: StateFamily,
        grid_points: int,
        shots: int,
        seed: int,
        quantifier: Quantifier = Quantifier.GENERALIZED,
        model: Optional[SeparabilityModel] = None,
        workers: Optional[int] = None,
    ) -> List[ExperimentRow]:
        """
        Simulated experiment on a uniform grid; point i uses seed + i.

        Raises:
            TomographyError: On invalid shots or grid size
        """
        if shots < 0:
            raise TomographyError(f"shots must be >= 0, got {shots}")
        grid = uniform_grid(grid_points)
        if model is None:
            model = model_for_k(family(0.0).dims, 2)
        workers = workers or self.config.scan_workers
        logger.info(
            f"Simulating tomography of {family.name} on {len(grid)} points "
            f"({'exact' if shots == 0 else f'{shots} shots/setting'}, seed {seed})"
        )

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = await asyncio.gather(
                *(
                    loop.run_in_executor(
                        pool, self.run_point, family, q, shots, seed + i, quantifier, model
                    )
                    for i, q in enumerate(grid)
                )
            )
        return list(rows)

    def end_to_end_experiment(self, *args, **kwargs) -> List[ExperimentRow]:
        """Blocking wrapper around ``end_to_end_experiment_async``."""
        return asyncio.run(self.end_to_end_experiment_async(*args, **kwargs))


def write_counts_jsonl(records: Sequence[CountsRecord], path: Union[str, Path]) -> Path:
    """One CountsRecord JSON object per line, written atomically."""
    lines = [CountsRecordPayload.from_record(r).model_dump_json() for r in records]
    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_counts_jsonl(path: Union[str, Path]) -> List[CountsRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(CountsRecordPayload.model_validate_json(line).to_record())
    return records


# Global service instance
tomography_service = TomographyService()
