"""
Scan service for one-parameter state families.

Grid points are solved concurrently in a thread pool; the curve is then
analyzed for kinks (second-difference outliers), witness jumps and phases.
"""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Settings, settings
from ..models.base import GeophaseError
from ..models.robustness import Quantifier, RobustnessResult
from ..models.scan import (
    FixedWitnessTable,
    KinkReport,
    PhaseInterval,
    ScanError,
    ScanResult,
    WitnessJump,
)
from ..models.state import StateFamily
from ..models.witness import Normalization, SeparabilityModel, Witness
from .numerics import frobenius_distance
from .robustness import RobustnessService, robustness_service

logger = logging.getLogger(__name__)

# Reference kink locations for the GHZ/W family, keyed by (family, quantifier, model)
REFERENCE_KINKS: Dict[Tuple[str, Quantifier, str], float] = {
    ("ghz-w", Quantifier.GENERALIZED, "ppt-mixture"): 0.33,
    ("ghz-w", Quantifier.RANDOM, "ppt-intersect"): 0.47,
}

RELAXATION_GAP = "RELAXATION_GAP"
KINK_WITHDRAWN = "KINK_WITHDRAWN"
NO_CORROBORATION = "no witness corroboration"

OptionalValues = Sequence[Optional[float]]


def uniform_grid(points: int) -> List[float]:
    if points < 5:
        raise ScanError(f"A scan needs at least 5 grid points, got {points}")
    return [float(q) for q in np.linspace(0.0, 1.0, points)]


def grid_spacing(grid: Sequence[float]) -> float:
    """
    Common spacing of a uniform grid.

    Raises:
        ScanError: If the grid has fewer than 5 points or is not uniform
    """
    if len(grid) < 5:
        raise ScanError(f"Need at least 5 samples, got {len(grid)}")
    steps = np.diff(np.asarray(grid, dtype=float))
    h = float(np.mean(steps))
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise ScanError("Grid is not uniform and strictly increasing")
    return h


def _defined(values: OptionalValues, *indices: int) -> bool:
    return all(0 <= i < len(values) and values[i] is not None for i in indices)


def detect_kinks(
    grid: Sequence[float],
    values: OptionalValues,
    threshold: Optional[float] = None,
    config: Settings = settings,
    stderr: Optional[OptionalValues] = None,
) -> List[KinkReport]:
    """
    Flag interior points whose second difference stands out from the median.

    Args:
        grid: Uniform sample locations
        values: Curve values; None marks a failed point
        threshold: Score threshold (default from settings)
        stderr: Per-point standard errors of noisy values; the median
            second-difference noise then bounds the scale from below

    Returns:
        One KinkReport per run of adjacent flagged points, at the max score,
        with the run's refinement candidates (peak first, then the run ends)
    """
    threshold = threshold if threshold is not None else config.kink_threshold
    h = grid_spacing(grid)
    if len(values) != len(grid):
        raise ScanError("Curve and grid lengths differ")
    if stderr is not None and len(stderr) != len(grid):
        raise ScanError("Standard errors and grid lengths differ")

    scores: Dict[int, float] = {}
    noise: List[float] = []
    for i in range(1, len(grid) - 1):
        if not _defined(values, i - 1, i, i + 1):
            continue
        triple = (values[i - 1], values[i], values[i + 1])
        # Outer samples in the separable region: boundary handled by phase labels
        if min(triple[0], triple[2]) < config.kink_value_floor:
            continue
        scores[i] = abs(triple[2] - 2 * triple[1] + triple[0]) / h**2
        if stderr is not None:
            s = [stderr[j] or 0.0 for j in (i - 1, i, i + 1)]
            noise.append(float(np.sqrt(s[0] ** 2 + 4 * s[1] ** 2 + s[2] ** 2)) / h**2)
    if not scores:
        return []

    scale = max(float(np.median(list(scores.values()))), config.kink_noise_floor)
    if noise:
        scale = max(scale, float(np.median(noise)))
    flagged = sorted(i for i, dd in scores.items() if dd > threshold * scale)

    runs: List[List[int]] = []
    for i in flagged:
        if runs and i == runs[-1][-1] + 1:
            runs[-1].append(i)
        else:
            runs.append([i])

    reports = []
    for run in runs:
        peak = max(run, key=lambda i: scores[i])
        first, last = run[0], run[-1]
        if _defined(values, first - 2, first - 1):
            left = (values[first - 1] - values[first - 2]) / h
        else:
            left = (values[first] - values[first - 1]) / h
        if _defined(values, last + 1, last + 2):
            right = (values[last + 2] - values[last + 1]) / h
        else:
            right = (values[last + 1] - values[last]) / h
        # a bend spreads over the run; its slope breaks sit at the run ends
        ends = sorted({first, last} - {peak}, key=lambda i: -scores[i])
        reports.append(
            KinkReport(
                location=grid[peak],
                left_slope=float(left),
                right_slope=float(right),
                score=scores[peak] / scale,
                candidates=tuple(grid[i] for i in [peak] + ends),
            )
        )
    return reports


def localize_kink(
    grid: Sequence[float],
    values: OptionalValues,
    around: float,
    width: float,
    stderr: Optional[OptionalValues] = None,
    sigmas: Optional[float] = None,
    config: Settings = settings,
) -> Optional[KinkReport]:
    """
    Look for a slope break of a noisy curve near a known location.

    A continuous two-segment line is fitted to the samples within ``width``
    of ``around``, with the break at each interior sample in turn. The best
    break is reported when its slope change exceeds ``sigmas`` standard
    errors, taking the larger of the propagated and the residual error.

    Returns:
        KinkReport at the break, or None when the change is not significant

    Raises:
        ScanError: If fewer than 5 defined samples fall in the window
    """
    sigmas = sigmas if sigmas is not None else config.kink_sigmas
    grid_spacing(grid)
    if len(values) != len(grid):
        raise ScanError("Curve and grid lengths differ")
    window = [
        i
        for i, q in enumerate(grid)
        if abs(q - around) <= width + 1e-12 and values[i] is not None
    ]
    if len(window) < 5:
        raise ScanError(f"Need at least 5 samples within {width} of {around}, got {len(window)}")

    x = np.array([grid[i] for i in window], dtype=float)
    y = np.array([values[i] for i in window], dtype=float)
    best = None
    for k in range(2, len(window) - 2):
        design = np.column_stack([np.ones_like(x), x, np.maximum(0.0, x - x[k])])
        coef = np.linalg.lstsq(design, y, rcond=None)[0]
        rss = float(np.sum((y - design @ coef) ** 2))
        if best is None or rss < best[0]:
            best = (rss, k, coef, design)
    rss, k, coef, design = best

    unit = np.linalg.pinv(design.T @ design)
    variance = rss / (len(window) - 3) * unit[2, 2]
    if stderr is not None:
        s = np.array([stderr[i] or 0.0 for i in window], dtype=float)
        propagated = unit @ design.T @ np.diag(s**2) @ design @ unit
        variance = max(variance, float(propagated[2, 2]))
    jump = float(coef[2])
    score = abs(jump) / max(float(np.sqrt(variance)), 1e-15)
    if score < sigmas:
        logger.info(f"No significant slope break near {around:.4f} (score {score:.2f})")
        return None
    return KinkReport(
        location=float(x[k]),
        left_slope=float(coef[1]),
        right_slope=float(coef[1] + jump),
        score=score,
    )


def refine_kink_location(
    objective: Callable[[float], float],
    interval: Tuple[float, float],
    tol: Optional[float] = None,
    withdraw_ratio: Optional[float] = None,
    config: Settings = settings,
) -> KinkReport:
    """
    Shrink a bracket around a kink of a scalar function.

    Five equally spaced points are kept; each round keeps the two cells
    around the largest second difference and evaluates their midpoints.
    The location is the intersection of the outermost secant lines.

    Returns:
        Refined KinkReport, or one with a KINK_WITHDRAWN diagnostic when
        the slope jump fades as the bracket shrinks
    """
    tol = tol if tol is not None else config.refine_tol
    withdraw_ratio = withdraw_ratio if withdraw_ratio is not None else config.refine_withdraw_ratio
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ScanError(f"Invalid refinement interval [{lo}, {hi}]")

    xs = list(np.linspace(lo, hi, 5))
    fs = [objective(x) for x in xs]
    initial_jump = None

    def slopes():
        h = xs[1] - xs[0]
        return (fs[1] - fs[0]) / h, (fs[4] - fs[3]) / h

    while True:
        left, right = slopes()
        jump = abs(right - left)
        if initial_jump is None:
            initial_jump = jump
        if initial_jump <= 1e-12 or jump < withdraw_ratio * initial_jump:
            logger.warning(
                f"Kink in [{xs[0]:.6f}, {xs[4]:.6f}] withdrawn: slope jump {jump:.3e} "
                f"(initial {initial_jump:.3e})"
            )
            return KinkReport(
                location=xs[2],
                left_slope=left,
                right_slope=right,
                score=0.0,
                refined=False,
                diagnostic=KINK_WITHDRAWN,
            )
        if xs[4] - xs[0] <= tol:
            break
        dd = [abs(fs[j + 1] - 2 * fs[j] + fs[j - 1]) for j in (1, 2, 3)]
        j = 1 + int(np.argmax(dd))
        a, m, b = xs[j - 1], xs[j], xs[j + 1]
        fa, fm, fb = fs[j - 1], fs[j], fs[j + 1]
        q1, q3 = (a + m) / 2, (m + b) / 2
        xs = [a, q1, m, q3, b]
        fs = [fa, objective(q1), fm, objective(q3), fb]

    left, right = slopes()
    if abs(left - right) > 1e-12:
        location = (fs[4] - fs[0] + left * xs[0] - right * xs[4]) / (left - right)
        location = min(max(location, xs[0]), xs[4])
    else:
        location = xs[2]
    return KinkReport(
        location=float(location),
        left_slope=float(left),
        right_slope=float(right),
        score=float(abs(right - left) / initial_jump),
        refined=True,
    )


def witness_distances(curve: Sequence[Optional[RobustnessResult]]) -> List[float]:
    """Frobenius distances between consecutive witnesses (nan across gaps)."""

    def aligned(result: RobustnessResult) -> np.ndarray:
        w = result.witness
        if w.normalization is Normalization.TRACE_D:
            return w.matrix / w.dim
        return w.matrix

    distances = []
    for a, b in zip(curve[:-1], curve[1:]):
        if a is None or b is None:
            distances.append(float("nan"))
        else:
            distances.append(frobenius_distance(aligned(a), aligned(b)))
    return distances


def witness_jumps(
    grid: Sequence[float],
    curve: Sequence[Optional[RobustnessResult]],
    threshold: Optional[float] = None,
    config: Settings = settings,
) -> Tuple[List[WitnessJump], List[float]]:
    """
    Intervals where the optimal witness changes abruptly.

    Returns:
        (flagged jumps, all consecutive distances)
    """
    threshold = threshold if threshold is not None else config.witness_jump_threshold
    distances = witness_distances(curve)
    valid = [d for d in distances if not np.isnan(d)]
    if not valid:
        return [], distances
    median = float(np.median(valid))
    jumps = [
        WitnessJump(grid[i], grid[i + 1], d)
        for i, d in enumerate(distances)
        if not np.isnan(d) and d > threshold * median and d > config.witness_jump_floor
    ]
    return jumps, distances


def corroborate(kinks: List[KinkReport], jumps: Sequence[WitnessJump], h: float) -> None:
    """Mark each kink as lying in (or next to) a witness-jump interval, or annotate it."""
    for kink in kinks:
        kink.corroborated = any(
            jump.q_left - h <= kink.location <= jump.q_right + h for jump in jumps
        )
        if not kink.corroborated:
            kink.diagnostic = (
                NO_CORROBORATION if not kink.diagnostic else f"{kink.diagnostic}; {NO_CORROBORATION}"
            )


def fixed_witness_scan(
    family: StateFamily, witnesses: Sequence[Witness], grid_points: int
) -> FixedWitnessTable:
    """
    Evaluate fixed witnesses along the family, with their lower envelope.

    Raises:
        ScanError: If no witness is given or dimensions disagree
    """
    if not witnesses:
        raise ScanError("fixed_witness_scan needs at least one witness")
    grid = uniform_grid(grid_points)
    states = [family(q) for q in grid]
    for w in witnesses:
        if w.dim != states[0].dim:
            raise ScanError(f"Witness dimension {w.dim} does not match family dimension {states[0].dim}")
    values = np.array([[w.expectation(rho.matrix) for rho in states] for w in witnesses])
    envelope = values.min(axis=0)
    winner = values.argmin(axis=0)

    crossings = []
    for j in range(len(grid) - 1):
        a, b = int(winner[j]), int(winner[j + 1])
        if a == b:
            continue
        g0 = values[a, j] - values[b, j]
        g1 = values[a, j + 1] - values[b, j + 1]
        t = g0 / (g0 - g1) if g0 != g1 else 0.5
        crossings.append(grid[j] + t * (grid[j + 1] - grid[j]))
    return FixedWitnessTable(
        grid=tuple(grid),
        values=tuple(tuple(float(v) for v in row) for row in values),
        envelope=tuple(float(v) for v in envelope),
        crossings=tuple(float(c) for c in crossings),
    )


def phase_labels(
    grid: Sequence[float],
    values: OptionalValues,
    kinks: Sequence[KinkReport] = (),
    tol: Optional[float] = None,
) -> List[PhaseInterval]:
    """Separable intervals and entangled intervals split at kinks, in q order."""
    tol = tol if tol is not None else settings.separable_tol
    runs: List[List] = []
    for q, value in zip(grid, values):
        if value is None:
            if runs:
                runs[-1][2] = q
            continue
        separable = value <= tol
        if runs and runs[-1][0] == separable:
            runs[-1][2] = q
        else:
            runs.append([separable, q, q])

    phases = []
    counter = 0
    for separable, start, end in runs:
        if separable:
            phases.append(PhaseInterval("Separable", start, end))
            continue
        cuts = sorted(k.location for k in kinks if start < k.location < end)
        bounds = [start] + cuts + [end]
        for q0, q1 in zip(bounds[:-1], bounds[1:]):
            counter += 1
            phases.append(PhaseInterval(f"Entangled-{counter}", q0, q1))
    return phases


def lipschitz_estimate(grid: Sequence[float], values: OptionalValues) -> float:
    """max |f(q_{i+1}) - f(q_i)| / h over consecutive defined samples."""
    best = 0.0
    for i in range(len(grid) - 1):
        if _defined(values, i, i + 1):
            best = max(best, abs(values[i + 1] - values[i]) / (grid[i + 1] - grid[i]))
    return best


def flat_segment_slope(
    grid: Sequence[float], values: OptionalValues, location: float
) -> Tuple[Optional[float], Optional[float]]:
    """
    Least-squares slopes left and right of a kink, one grid step clear of it.

    Returns:
        (left slope, right slope); None for a side with fewer than 2 points
    """
    h = grid_spacing(grid)

    def fit(pairs):
        if len(pairs) < 2:
            return None
        xs, ys = zip(*pairs)
        return float(np.polyfit(xs, ys, 1)[0])

    defined = [(q, v) for q, v in zip(grid, values) if v is not None]
    left = fit([(q, v) for q, v in defined if q < location - h])
    right = fit([(q, v) for q, v in defined if q > location + h])
    return left, right


def compare_with_reference(
    kink: KinkReport,
    family: str,
    quantifier: Quantifier,
    model: str,
    tolerance: Optional[float] = None,
) -> KinkReport:
    """Attach the published location and a RELAXATION_GAP diagnostic when it is missed."""
    tolerance = tolerance if tolerance is not None else settings.reference_tolerance
    reference = REFERENCE_KINKS.get((family, quantifier, model))
    if reference is None:
        return kink
    kink.reference = reference
    kink.deviation = kink.location - reference
    if abs(kink.deviation) > tolerance:
        logger.warning(
            f"{RELAXATION_GAP}: kink at {kink.location:.4f} is {kink.deviation:+.4f} "
            f"from the reference {reference}"
        )
        kink.diagnostic = (
            RELAXATION_GAP if not kink.diagnostic else f"{RELAXATION_GAP}; {kink.diagnostic}"
        )
    return kink


class ScanService:
    """Service for family scans."""

    def __init__(self, config: Settings = settings, robustness: RobustnessService = robustness_service):
        """Initialize the scan service."""
        self.config = config
        self.robustness = robustness

    def evaluate(
        self, family: StateFamily, q: float, quantifier: Quantifier, model: SeparabilityModel
    ) -> RobustnessResult:
        return self.robustness.compute(family(q), model, quantifier)

    def _evaluate_point(self, family, q, quantifier, model):
        try:
            return self.evaluate(family, q, quantifier, model), None
        except (GeophaseError, np.linalg.LinAlgError) as e:
            logger.warning(f"Scan point q={q:.6f} failed: {e}")
            return None, f"q={q:.6f}: {e}"

    async def scan_family_async(
        self,
        family: StateFamily,
        quantifier: Quantifier,
        model: SeparabilityModel,
        grid_points: Optional[int] = None,
        threshold: Optional[float] = None,
        refine: bool = False,
        workers: Optional[int] = None,
    ) -> ScanResult:
        """
        Scan a family on a uniform grid and analyze the curve.

        Args:
            family: State family q -> rho(q)
            quantifier: Random or generalized robustness
            model: Separability model matching the family dims
            grid_points: Number of grid points (default from settings)
            threshold: Kink threshold override
            refine: Refine every detected kink by re-solving
            workers: Thread pool size

        Returns:
            ScanResult ordered by grid index

        Raises:
            ScanError: If too many grid points fail
        """
        grid = uniform_grid(grid_points or self.config.default_grid)
        workers = workers or self.config.scan_workers
        logger.info(
            f"Scanning {family.name} ({quantifier.value}, {model.tag}) on {len(grid)} points"
        )

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = await asyncio.gather(
                *(
                    loop.run_in_executor(pool, self._evaluate_point, family, q, quantifier, model)
                    for q in grid
                )
            )

        curve = [result for result, _ in outcomes]
        failures = [message for _, message in outcomes if message]
        if len(failures) > self.config.max_failed_fraction * len(grid):
            raise ScanError(
                f"{len(failures)} of {len(grid)} grid points failed; first: {failures[0]}"
            )

        result = ScanResult(
            family=family.name,
            quantifier=quantifier,
            model=model.tag,
            grid=grid,
            curve=curve,
            failures=failures,
        )
        self.analyze(result, threshold=threshold)
        if refine:
            self.refine_all(result, family, model)
        return result

    def scan_family(self, *args, **kwargs) -> ScanResult:
        """Blocking wrapper around ``scan_family_async``."""
        return asyncio.run(self.scan_family_async(*args, **kwargs))

    def analyze(self, result: ScanResult, threshold: Optional[float] = None) -> ScanResult:
        """Fill kinks, witness jumps, phases and the Lipschitz estimate."""
        values = result.values
        result.kinks = detect_kinks(result.grid, values, threshold, self.config)
        result.witness_jumps, result.witness_distances = witness_jumps(
            result.grid, result.curve, config=self.config
        )
        corroborate(result.kinks, result.witness_jumps, result.spacing)
        for kink in result.kinks:
            compare_with_reference(
                kink, result.family, result.quantifier, result.model, self.config.reference_tolerance
            )
        result.phases = phase_labels(result.grid, values, result.kinks, self.config.separable_tol)
        result.lipschitz = lipschitz_estimate(result.grid, values)
        logger.info(
            f"{result.family}: {len(result.kinks)} kink(s), "
            f"{len(result.witness_jumps)} witness jump(s), L = {result.lipschitz:.4f}"
        )
        return result

    def refine_kink(
        self,
        family: StateFamily,
        quantifier: Quantifier,
        model: SeparabilityModel,
        interval: Tuple[float, float],
    ) -> KinkReport:
        """Refine a kink by re-solving the robustness inside ``interval``."""

        def objective(q: float) -> float:
            return self.evaluate(family, q, quantifier, model).value

        return refine_kink_location(objective, interval, config=self.config)

    def refine_all(self, result: ScanResult, family: StateFamily, model: SeparabilityModel) -> ScanResult:
        """
        Refine every kink in place.

        Each candidate of a report is bracketed by +-2h and refined until one
        survives. A report whose candidates are all withdrawn stays in the
        result, unrefined, with a KINK_WITHDRAWN diagnostic.
        """
        h = result.spacing
        reports = []
        for kink in result.kinks:
            refined = None
            for location in kink.candidates or (kink.location,):
                interval = (max(0.0, location - 2 * h), min(1.0, location + 2 * h))
                attempt = self.refine_kink(family, result.quantifier, model, interval)
                if attempt.diagnostic != KINK_WITHDRAWN:
                    refined = attempt
                    break
            if refined is None:
                refined = replace(
                    kink, corroborated=None, reference=None, deviation=None, diagnostic=KINK_WITHDRAWN
                )
            else:
                refined.score = kink.score
                refined.candidates = kink.candidates
            reports.append(refined)
        kept = [kink for kink in reports if kink.refined]
        corroborate(kept, result.witness_jumps, h)
        for kink in kept:
            compare_with_reference(
                kink, result.family, result.quantifier, result.model, self.config.reference_tolerance
            )
        result.kinks = reports
        result.phases = phase_labels(result.grid, result.values, kept, self.config.separable_tol)
        return result


# Global service instance
scan_service = ScanService()
