"""
Tests for CSV, JSON and SVG writers.
"""

from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from geophase.models import ExperimentRow, KinkReport, Quantifier, ScanResult, SdpStatus, WitnessJump
from geophase.schemas.scan import ScanSummaryPayload
from geophase.services.export import (
    EXPERIMENT_COLUMNS,
    SCAN_COLUMNS,
    ExportError,
    Series,
    atomic_write_text,
    emit_svg,
    experiment_csv,
    scan_csv,
    write_json,
)
from geophase.services.scan import KINK_WITHDRAWN

GOLDEN_SVG = Path(__file__).resolve().parent / "data" / "golden_curve.svg"


def _point(value):
    return SimpleNamespace(
        quantifier=Quantifier.RANDOM,
        model="exact2q",
        value=value,
        dual_value=value,
        gap=0.0,
        status=SdpStatus.OPTIMAL,
    )


class TestTables:
    """Test cases for CSV output."""

    def setup_method(self):
        """Set up test fixtures."""
        self.result = ScanResult(
            family="werner",
            quantifier=Quantifier.RANDOM,
            model="exact2q",
            grid=[0.0, 0.25, 0.5, 0.75, 1.0],
            curve=[_point(0.0), None, _point(0.5), _point(1.25), _point(2.0)],
            failures=["q=0.250000: stub"],
            witness_jumps=[WitnessJump(0.5, 0.75, 3.0)],
            witness_distances=[float("nan"), float("nan"), 3.0, 0.1],
            kinks=[KinkReport(0.5, 1.0, 3.0, 40.0)],
        )

    def test_scan_csv(self):
        """Test the scan table with a failed point and witness-jump flags."""
        lines = scan_csv(self.result).splitlines()
        assert lines[0] == ",".join(SCAN_COLUMNS)
        assert len(lines) == 6
        assert lines[2].split(",")[6] == "failed"
        assert lines[3].split(",")[-1] == "3.0*"
        assert lines[4].split(",")[-1] == "0.1"
        assert lines[5].split(",")[-1] == ""
        assert lines[4].split(",")[3] == "1.25"

    def test_experiment_csv(self):
        """Test one experiment row."""
        rows = [ExperimentRow(q=0.5, estimate=0.25, stderr=0.01, truth=0.3, shots=100, seed=4)]
        lines = experiment_csv(rows).splitlines()
        assert lines[0] == ",".join(EXPERIMENT_COLUMNS)
        assert lines[1] == "0.5,0.25,0.01,0.3,100,4"

    def test_summary_json(self, tmp_path):
        """Test that the kink JSON validates back into its schema."""
        path = write_json(ScanSummaryPayload.from_result(self.result), tmp_path / "scan.kinks.json")
        payload = ScanSummaryPayload.model_validate_json(path.read_text())
        assert payload.kinks[0].location == 0.5
        assert payload.grid_points == 5

    def test_withdrawn_kink_in_summary(self, tmp_path):
        """Test that a withdrawn kink keeps its diagnostic in the kink JSON."""
        withdrawn = KinkReport(0.75, 1.0, 1.0, 12.0, diagnostic=KINK_WITHDRAWN, candidates=(0.75, 0.5))
        self.result.kinks = [withdrawn]
        path = write_json(ScanSummaryPayload.from_result(self.result), tmp_path / "scan.kinks.json")
        payload = ScanSummaryPayload.model_validate_json(path.read_text())
        assert payload.kinks[0].diagnostic == KINK_WITHDRAWN
        assert not payload.kinks[0].refined
        assert payload.kinks[0].candidates == [0.75, 0.5]


class TestAtomicWrite:
    """Test cases for atomic writes."""

    def test_replaces_file(self, tmp_path):
        """Test that an existing file is replaced without leftovers."""
        path = tmp_path / "out.txt"
        path.write_text("old")
        atomic_write_text(path, "new")
        assert path.read_text() == "new"
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]

    def test_missing_directory(self, tmp_path):
        """Test that a missing directory raises an export error."""
        with pytest.raises(ExportError):
            atomic_write_text(tmp_path / "missing" / "out.txt", "x")


class TestSvg:
    """Test cases for SVG plots."""

    def test_markers_and_polyline(self, tmp_path):
        """Test one polyline, one kink marker and an escaped title."""
        xs = list(np.linspace(0, 1, 11))
        series = Series("rr", xs, [abs(x - 0.5) for x in xs])
        path = emit_svg([series], tmp_path / "curve.svg", kinks=[0.5], title="test <curve>")
        svg = path.read_text()
        assert svg.startswith("<svg")
        assert svg.count('class="kink"') == 1
        assert svg.count("<polyline") == 1
        assert "test &lt;curve&gt;" in svg

    def test_overlay_with_error_bars(self, tmp_path):
        """Test two overlaid series with error bars."""
        xs = [0.0, 0.5, 1.0]
        series = [
            Series("estimate", xs, [0.0, 0.4, 1.1], [0.05, 0.05, 0.05]),
            Series("truth", xs, [0.0, 0.5, 1.0], color="#d62728"),
        ]
        svg = emit_svg(series, tmp_path / "tomo.svg").read_text()
        assert svg.count("<polyline") == 2
        assert svg.count('class="error"') == 3
        assert svg.count('class="kink"') == 0

    def test_too_few_points(self, tmp_path):
        """Test rejection of a single-point series."""
        with pytest.raises(ExportError):
            emit_svg([Series("one", [0.0], [1.0])], tmp_path / "bad.svg")

    def test_failed_points_skipped(self, tmp_path):
        """Test that None values drop out of the polyline."""
        series = Series("gaps", [0.0, 0.5, 1.0], [0.0, None, 1.0])
        svg = emit_svg([series], tmp_path / "gaps.svg").read_text()
        points = svg.split('points="')[1].split('"')[0]
        assert len(points.split()) == 2

    def test_golden_file(self, tmp_path):
        """Test a small plot byte for byte against the stored rendering."""
        series = Series("rr", [0.0, 0.5, 1.0], [0.0, 0.5, 1.0])
        path = emit_svg([series], tmp_path / "golden.svg", kinks=[0.5], title="golden")
        assert path.read_text() == GOLDEN_SVG.read_text()
