"""
``tomo`` command: simulated tomography experiment along a family.
"""

import logging
from pathlib import Path
from typing import List, Sequence

from ..config import Settings
from ..dependencies import get_family, get_model, get_quantifier, get_settings, relaxation_header
from ..models.scan import ScanError
from ..models.tomography import ExperimentRow
from ..schemas.run_config import RunConfig
from ..services.export import Series, atomic_write_text, emit_svg, experiment_csv
from ..services.robustness import RobustnessService
from ..services.scan import detect_kinks, grid_spacing, localize_kink
from ..services.sdp_solver import InteriorPointSolver
from ..services.tomography import TomographyService

logger = logging.getLogger(__name__)


def cmd_tomo(config: RunConfig) -> int:
    """Run the experiment, write its CSV (+ SVG overlay) and print a summary."""
    run_settings = get_settings(config)
    family = get_family(config)
    model = get_model(config, family(0.0).dims)
    quantifier = get_quantifier(config)
    print(relaxation_header(model, config.k))

    service = TomographyService(
        run_settings, RobustnessService(run_settings, InteriorPointSolver(run_settings))
    )
    rows = service.end_to_end_experiment(
        family,
        config.grid,
        config.shots,
        config.seed,
        quantifier=quantifier,
        model=model,
        workers=config.workers,
    )

    out = config.out or Path(f"tomo_{family.name}_{quantifier.value}_{model.tag}.csv")
    atomic_write_text(out, experiment_csv(rows))
    if config.svg:
        qs = [row.q for row in rows]
        emit_svg(
            [
                Series("estimate", qs, [row.estimate for row in rows], [row.stderr for row in rows]),
                Series("truth", qs, [row.truth for row in rows], color="#d62728"),
            ],
            config.svg,
            title=f"{family.name}: measured -<W> vs. {quantifier.value}",
            y_label="-<W>",
        )

    deviation = max(abs(row.estimate - row.truth) for row in rows)
    detected = sum(1 for row in rows if row.detected)
    mode = "exact" if config.shots == 0 else f"{config.shots} shots/setting"
    print(f"{len(rows)} points ({mode}, seed {config.seed}): max |estimate - truth| = {deviation:.3e}")
    print(f"entanglement detected at {detected} point(s)")
    for location in noisy_kinks(rows, run_settings):
        print(f"noisy kink near q = {location:.4f}")
    return 0


def noisy_kinks(rows: Sequence[ExperimentRow], run_settings: Settings) -> List[float]:
    """Slope breaks of the estimate curve near the kinks of the exact curve."""
    grid = [row.q for row in rows]
    h = grid_spacing(grid)
    found = []
    for kink in detect_kinks(grid, [row.truth for row in rows], config=run_settings):
        try:
            located = localize_kink(
                grid,
                [row.estimate for row in rows],
                kink.location,
                3 * h,
                stderr=[row.stderr for row in rows],
                config=run_settings,
            )
        except ScanError as e:
            logger.info(f"Skipping kink at {kink.location:.4f}: {e}")
            continue
        if located is not None:
            found.append(located.location)
    return found
