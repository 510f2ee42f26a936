"""
``scan`` command: robustness curve of a family with kink analysis.
"""

import logging
from pathlib import Path

from ..dependencies import get_family, get_model, get_quantifier, get_settings, relaxation_header
from ..schemas.run_config import RunConfig
from ..schemas.scan import ScanSummaryPayload
from ..services.export import Series, atomic_write_text, emit_svg, scan_csv, write_json
from ..services.robustness import RobustnessService
from ..services.scan import KINK_WITHDRAWN, ScanService, flat_segment_slope
from ..services.sdp_solver import InteriorPointSolver

logger = logging.getLogger(__name__)


def cmd_scan(config: RunConfig) -> int:
    """Scan, write CSV + kink JSON (+ SVG) and print the kink summary."""
    run_settings = get_settings(config)
    family = get_family(config)
    model = get_model(config, family(0.0).dims)
    quantifier = get_quantifier(config)
    print(relaxation_header(model, config.k))

    service = ScanService(
        run_settings, RobustnessService(run_settings, InteriorPointSolver(run_settings))
    )
    result = service.scan_family(
        family,
        quantifier,
        model,
        grid_points=config.grid,
        refine=config.refine,
        workers=config.workers,
    )

    out = config.out or Path(f"scan_{family.name}_{quantifier.value}_{model.tag}.csv")
    atomic_write_text(out, scan_csv(result))
    write_json(ScanSummaryPayload.from_result(result), out.with_suffix(".kinks.json"))
    if config.svg:
        emit_svg(
            [Series(f"{quantifier.value} ({model.tag})", result.grid, result.values)],
            config.svg,
            kinks=[k.location for k in result.kinks if KINK_WITHDRAWN not in (k.diagnostic or "")],
            title=f"{family.name}: {quantifier.value} robustness",
        )

    if result.failures:
        print(f"{len(result.failures)} grid point(s) failed")
    if not result.kinks:
        print("no kinks")
    for kink in result.kinks:
        left, right = flat_segment_slope(result.grid, result.values, kink.location)
        line = (
            f"kink at q = {kink.location:.4f}  slopes {kink.left_slope:+.4f} / "
            f"{kink.right_slope:+.4f}  score {kink.score:.1f}"
            f"{'  refined' if kink.refined else ''}"
        )
        if left is not None and right is not None:
            line += f"  fitted slopes {left:+.2e} / {right:+.2e}"
        if kink.reference is not None:
            line += f"  reference {kink.reference:.2f} (deviation {kink.deviation:+.4f})"
        if kink.diagnostic:
            line += f"  [{kink.diagnostic}]"
        print(line)
    for phase in result.phases:
        print(f"{phase.label}: [{phase.q_start:.4f}, {phase.q_end:.4f}]")
    print(f"Lipschitz estimate L = {result.lipschitz:.4f}")
    return 0
