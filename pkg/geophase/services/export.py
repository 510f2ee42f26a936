"""
Output writers: atomic file writes, CSV tables, JSON documents and SVG plots.
"""

import csv
import io
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

from jinja2 import Environment, FileSystemLoader, StrictUndefined
from pydantic import BaseModel

from ..models.base import GeophaseError
from ..models.scan import ScanResult
from ..models.tomography import ExperimentRow

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"

SCAN_COLUMNS = ("q", "quantifier", "model", "value", "dual_value", "gap", "status", "witness_jump")
EXPERIMENT_COLUMNS = ("q", "estimate", "stderr", "truth", "N", "seed")


class ExportError(GeophaseError):
    """Exception raised when an output cannot be produced or written."""

    pass


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write text through a temporary file in the target directory and rename it.

    Raises:
        ExportError: If the directory is missing or not writable
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")
    logger.info(f"Wrote {path}")
    return path


def write_json(payload: BaseModel, path: Union[str, Path]) -> Path:
    return atomic_write_text(path, payload.model_dump_json(indent=2) + "\n")


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def scan_csv(result: ScanResult) -> str:
    """Scan table; failed points keep their row with empty numeric fields."""
    flagged = {round(j.q_left, 12) for j in result.witness_jumps}
    distances = result.witness_distances
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for i, (q, point) in enumerate(zip(result.grid, result.curve)):
        jump = ""
        if i < len(distances) and distances[i] == distances[i]:
            jump = repr(float(distances[i])) + ("*" if round(q, 12) in flagged else "")
        if point is None:
            writer.writerow([repr(q), result.quantifier.value, result.model, "", "", "", "failed", jump])
            continue
        writer.writerow(
            [
                repr(q),
                point.quantifier.value,
                point.model,
                _fmt(point.value),
                _fmt(point.dual_value),
                _fmt(point.gap),
                point.status.value,
                jump,
            ]
        )
    return buffer.getvalue()


def experiment_csv(rows: Sequence[ExperimentRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(EXPERIMENT_COLUMNS)
    for row in rows:
        writer.writerow(
            [repr(row.q), _fmt(row.estimate), _fmt(row.stderr), _fmt(row.truth), row.shots, row.seed]
        )
    return buffer.getvalue()


@dataclass
class Series:
    """A named polyline with optional symmetric error bars."""

    name: str
    xs: Sequence[float]
    ys: Sequence[Optional[float]]
    errors: Optional[Sequence[float]] = None
    color: str = "#1f77b4"


@dataclass
class _Plot:
    width: int = 640
    height: int = 400
    margin: int = 50
    x_range: tuple = (0.0, 1.0)
    y_range: tuple = (0.0, 1.0)
    polylines: List[dict] = field(default_factory=list)
    markers: List[dict] = field(default_factory=list)
    error_bars: List[dict] = field(default_factory=list)
    ticks: List[dict] = field(default_factory=list)


def _number(value: float) -> str:
    return f"{value:.2f}"


def emit_svg(
    series: Sequence[Series],
    path: Union[str, Path],
    kinks: Sequence[float] = (),
    title: str = "",
    x_label: str = "q",
    y_label: str = "robustness",
) -> Path:
    """
    Render series as a self-contained SVG with axes, one polyline per series
    and one marker per kink.

    Raises:
        ExportError: If a series has fewer than 2 points or the path is unwritable
    """
    if not series:
        raise ExportError("Nothing to plot")
    for s in series:
        if sum(1 for y in s.ys if y is not None) < 2:
            raise ExportError(f"Series '{s.name}' needs at least 2 points")

    ys = [y for s in series for y in s.ys if y is not None]
    if any(s.errors for s in series):
        ys += [y + e for s in series if s.errors for y, e in zip(s.ys, s.errors) if y is not None]
        ys += [y - e for s in series if s.errors for y, e in zip(s.ys, s.errors) if y is not None]
    y_min, y_max = min(min(ys), 0.0), max(ys)
    if y_max - y_min < 1e-12:
        y_max = y_min + 1.0
    x_min = min(min(s.xs) for s in series)
    x_max = max(max(s.xs) for s in series)
    if x_max - x_min < 1e-12:
        x_max = x_min + 1.0

    plot = _Plot(x_range=(x_min, x_max), y_range=(y_min, y_max))
    inner_w = plot.width - 2 * plot.margin
    inner_h = plot.height - 2 * plot.margin

    def sx(x: float) -> str:
        return _number(plot.margin + (x - x_min) / (x_max - x_min) * inner_w)

    def sy(y: float) -> str:
        return _number(plot.height - plot.margin - (y - y_min) / (y_max - y_min) * inner_h)

    for s in series:
        points = " ".join(f"{sx(x)},{sy(y)}" for x, y in zip(s.xs, s.ys) if y is not None)
        plot.polylines.append({"name": s.name, "points": points, "color": s.color})
        if s.errors:
            for x, y, e in zip(s.xs, s.ys, s.errors):
                if y is None:
                    continue
                plot.error_bars.append(
                    {"x": sx(x), "y1": sy(y - e), "y2": sy(y + e), "color": s.color}
                )
    for location in kinks:
        plot.markers.append({"x": sx(location), "label": f"{location:.3f}"})
    for i in range(5):
        x = x_min + i * (x_max - x_min) / 4
        y = y_min + i * (y_max - y_min) / 4
        plot.ticks.append({"x": sx(x), "x_label": f"{x:.2f}", "y": sy(y), "y_label": f"{y:.3g}"})

    env = Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        undefined=StrictUndefined,
        autoescape=True,
        keep_trailing_newline=True,
    )
    svg = env.get_template("curve.svg.j2").render(
        plot=plot,
        title=title,
        x_label=x_label,
        y_label=y_label,
        legend=[{"name": s.name, "color": s.color} for s in series],
    )
    return atomic_write_text(path, svg)
