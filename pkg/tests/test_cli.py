"""
Tests for the command-line interface.
"""

import csv
import json

import pytest

from geophase.config import settings
from geophase.main import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, main
from geophase.models import ScanError


def _rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestRobustnessCommand:
    """Test cases for ``robustness``."""

    def test_bell_rr(self, data_dir, tmp_path, capsys):
        """Test random robustness of the Bell state with the exact model."""
        out = tmp_path / "bell.json"
        code = main(["robustness", "--state", str(data_dir / "bell.json"), "--model", "exact2q", "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["value"] == pytest.approx(2.0, abs=1e-5)
        assert payload["witness"]["certificate"]["mode"] == "summed"
        assert capsys.readouterr().out.startswith("# model exact2q")

    def test_maximally_mixed(self, data_dir, tmp_path, capsys):
        """Test that a separable state prints the clamp notice."""
        out = tmp_path / "mixed.json"
        code = main(["robustness", "--state", str(data_dir / "maximally-mixed.json"), "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["value"] == 0.0
        assert payload["clamped"]
        assert "clamped to 0" in capsys.readouterr().out

    def test_bell_gr(self, data_dir, tmp_path):
        """Test generalized robustness of the Bell state."""
        out = tmp_path / "bell_gr.json"
        code = main(["robustness", "--state", str(data_dir / "bell.json"), "--quantifier", "gr", "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["value"] == pytest.approx(1.0, abs=1e-3)
        assert payload["optimal_noise"] is not None

    def test_stdout_json(self, data_dir, capsys):
        """Test the JSON result on stdout without --out."""
        assert main(["robustness", "--state", str(data_dir / "bell.json")]) == EXIT_OK
        assert '"quantifier": "rr"' in capsys.readouterr().out


class TestWitnessCommand:
    """Test cases for ``witness``."""

    def test_sdp_witness(self, data_dir, tmp_path, capsys):
        """Test the dual-SDP witness file and its printed value."""
        out = tmp_path / "w.json"
        code = main(["witness", "--state", str(data_dir / "bell.json"), "--out", str(out)])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["trace"] == pytest.approx(4.0)
        assert payload["provenance"] == "dual-sdp"
        line = next(text for text in capsys.readouterr().out.splitlines() if text.startswith("Tr(W rho)"))
        assert float(line.split("=")[1]) == pytest.approx(-2.0, abs=1e-5)

    def test_analytic_ghz(self, data_dir, tmp_path, capsys):
        """Test the analytic GHZ witness and its overlap bound."""
        out = tmp_path / "ghz_w.json"
        code = main(
            ["witness", "--state", str(data_dir / "ghz.json"), "--mode", "analytic", "--restarts", "8", "--out", str(out)]
        )
        assert code == EXIT_OK
        line = next(text for text in capsys.readouterr().out.splitlines() if text.startswith("lambda"))
        assert float(line.split()[2]) == pytest.approx(0.5, abs=1e-9)
        payload = json.loads(out.read_text())
        assert payload["overlap_bound"] == pytest.approx(0.5, abs=1e-9)
        assert payload["provenance"] == "pure-overlap"

    def test_analytic_product(self, data_dir, tmp_path, capsys):
        """Test that a product state is reported as not detected."""
        out = tmp_path / "product_w.json"
        code = main(
            ["witness", "--state", str(data_dir / "product.json"), "--mode", "analytic", "--restarts", "4", "--out", str(out)]
        )
        assert code == EXIT_OK
        assert "not detected" in capsys.readouterr().out

    def test_analytic_mixed_rejected(self, data_dir):
        """Test rejection of a mixed state in analytic mode."""
        code = main(["witness", "--state", str(data_dir / "maximally-mixed.json"), "--mode", "analytic"])
        assert code == EXIT_INPUT


class TestTomoCommand:
    """Test cases for ``tomo``."""

    def test_negative_shots(self, tmp_path):
        """Test rejection of negative shots."""
        code = main(["tomo", "--family", "werner", "--shots", "-1", "--out", str(tmp_path / "t.csv")])
        assert code == EXIT_INPUT

    def test_exact_mode(self, tmp_path):
        """Test that the exact-mode CSV matches the robustness."""
        out = tmp_path / "tomo.csv"
        code = main(
            ["tomo", "--family", "werner", "--grid", "5", "--quantifier", "rr", "--shots", "0", "--out", str(out)]
        )
        assert code == EXIT_OK
        rows = _rows(out)
        assert len(rows) == 5
        for row in rows:
            # witness value against the primal optimum: equal up to the duality gap tolerance
            truth = float(row["truth"])
            tol = settings.duality_gap_tol * (1 + abs(truth))
            assert float(row["estimate"]) == pytest.approx(truth, abs=tol)
            assert row["N"] == "0"

    def test_reproducible_csv(self, tmp_path):
        """Test that a fixed seed gives byte-identical CSV files."""
        outputs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            argv = ["tomo", "--family", "werner", "--grid", "5", "--shots", "200", "--seed", "7", "--out", str(out)]
            assert main(argv) == EXIT_OK
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert [row["seed"] for row in _rows(tmp_path / "a.csv")] == ["7", "8", "9", "10", "11"]

    def test_svg_overlay(self, tmp_path):
        """Test the estimate-versus-truth SVG overlay."""
        svg = tmp_path / "tomo.svg"
        argv = ["tomo", "--family", "werner", "--grid", "5", "--out", str(tmp_path / "t.csv"), "--svg", str(svg)]
        assert main(argv) == EXIT_OK
        assert svg.read_text().count("<polyline") == 2


class TestScanCommand:
    """Test cases for ``scan``."""

    def test_constant_family(self, tmp_path, capsys):
        """Test a separable constant family: zero curve, no kinks, one phase."""
        out = tmp_path / "scan.csv"
        code = main(["scan", "--family", "constant-mixed", "--grid", "5", "--out", str(out)])
        assert code == EXIT_OK
        rows = _rows(out)
        assert [float(row["value"]) for row in rows] == [0.0] * 5
        assert "no kinks" in capsys.readouterr().out
        summary = json.loads((tmp_path / "scan.kinks.json").read_text())
        assert summary["kinks"] == []
        assert summary["phases"][0]["label"] == "Separable"

    def test_numerical_failure(self, tmp_path, monkeypatch):
        """Test the numerical exit code on a failed scan."""
        def fail(*args, **kwargs):
            raise ScanError("too many failed points")

        monkeypatch.setattr("geophase.commands.scan.ScanService.scan_family", fail)
        code = main(["scan", "--family", "werner", "--grid", "5", "--out", str(tmp_path / "s.csv")])
        assert code == EXIT_NUMERICAL


class TestInputHandling:
    """Test cases for argument and file validation."""

    def test_missing_file(self, tmp_path):
        """Test the input exit code for a missing state file."""
        assert main(["robustness", "--state", str(tmp_path / "nope.json")]) == EXIT_INPUT

    def test_malformed_file(self, tmp_path):
        """Test the input exit code for malformed JSON."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["robustness", "--state", str(path)]) == EXIT_INPUT

    def test_invalid_state(self, tmp_path):
        """Test the input exit code for a non-density matrix."""
        path = tmp_path / "bad_trace.json"
        path.write_text(json.dumps({"dim": 2, "dims": [2], "re": [1, 0, 0, 1], "im": [0, 0, 0, 0]}))
        assert main(["robustness", "--state", str(path)]) == EXIT_INPUT

    def test_missing_state(self):
        """Test the input exit code without a state source."""
        assert main(["robustness"]) == EXIT_INPUT

    def test_unsupported_k(self, data_dir):
        """Test the input exit code for an unsupported k."""
        assert main(["robustness", "--state", str(data_dir / "bell.json"), "--k", "3"]) == EXIT_INPUT

    def test_unknown_family(self, tmp_path):
        """Test the input exit code for an unknown family."""
        assert main(["scan", "--family", "cluster", "--out", str(tmp_path / "s.csv")]) == EXIT_INPUT

    def test_unknown_command(self):
        """Test the input exit code for an unknown command."""
        assert main(["plot"]) == EXIT_INPUT

    def test_help(self):
        """Test that --help exits cleanly."""
        assert main(["--help"]) == EXIT_OK
