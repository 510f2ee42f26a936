"""Robustness curves of the GHZ-W family under both PPT relaxations.

Scans random and generalized robustness against the intersection model
(full separability) and the mixture model (biseparability), writes one CSV
per curve and a combined SVG with every refined kink marked.

Usage:
    python scripts/reproduce_figure.py [output_dir] [grid_points]
"""

import logging
import sys
from pathlib import Path

# Ensure project root on PYTHONPATH
PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from geophase.models.base import GeophaseError
from geophase.models.robustness import Quantifier
from geophase.models.witness import ModelKind
from geophase.services.export import Series, atomic_write_text, emit_svg, scan_csv
from geophase.services.scan import scan_service
from geophase.services.separability import make_model
from geophase.services.states import ghz_w

COLORS = {
    (Quantifier.RANDOM, ModelKind.INTERSECT_PPT): "#1f77b4",
    (Quantifier.GENERALIZED, ModelKind.INTERSECT_PPT): "#ff7f0e",
    (Quantifier.RANDOM, ModelKind.MIXTURE_PPT): "#2ca02c",
    (Quantifier.GENERALIZED, ModelKind.MIXTURE_PPT): "#d62728",
}


def reproduce(output_dir: Path, grid_points: int = 101) -> None:
    family = ghz_w()
    output_dir.mkdir(parents=True, exist_ok=True)
    series = []
    kinks = []
    try:
        for (quantifier, kind), color in COLORS.items():
            model = make_model(kind, family.dims)
            result = scan_service.scan_family(
                family, quantifier, model, grid_points=grid_points, refine=True
            )
            name = f"{quantifier.value}-{model.tag}"
            atomic_write_text(output_dir / f"ghz-w_{name}.csv", scan_csv(result))
            series.append(Series(name, result.grid, result.values, color=color))
            for kink in result.kinks:
                print(f"{name}: kink at q = {kink.location:.4f} ({kink.diagnostic or 'ok'})")
                kinks.append(kink.location)
            if not result.kinks:
                print(f"{name}: no kinks")
        emit_svg(series, output_dir / "ghz-w.svg", kinks=kinks, title="GHZ-W robustness")
        print(f"Curves written to {output_dir}")
    except GeophaseError as exc:
        print(f"Error during scan: {exc}")
        sys.exit(2)


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else PROJECT_ROOT / "figures"
    points = int(sys.argv[2]) if len(sys.argv) > 2 else 101
    reproduce(out, points)
