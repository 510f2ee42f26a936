"""
Tests for the tomography simulator.
"""

import numpy as np
import pytest

from geophase.models import (
    CountsRecord,
    MeasurementSetting,
    ModelKind,
    PauliExpectations,
    Quantifier,
    TomographyError,
)
from geophase.services.numerics import trace_distance
from geophase.services.separability import make_model
from geophase.services.states import ket_bell, ket_zero, maximally_mixed, random_density, werner_family
from geophase.services.tomography import (
    TomographyService,
    all_settings,
    estimate_pauli_expectations,
    measure_all,
    pauli_coefficients,
    pauli_string_matrix,
    read_counts_jsonl,
    reconstruct,
    simulate_counts,
    witness_expectation,
    write_counts_jsonl,
)


class TestSimulation:
    """Test cases for outcome sampling."""

    def test_setting_count(self):
        """Test the 3^n settings in lexicographic order."""
        settings_3 = all_settings(3)
        assert len(settings_3) == 27
        assert settings_3[0].label == "XXX"
        assert settings_3[-1].label == "ZZZ"

    def test_zero_state_z(self):
        """Test that |0> always yields outcome 0 in Z."""
        record = simulate_counts(ket_zero(1).projector(), MeasurementSetting(("Z",)), 100, seed=1)
        assert record.counts.tolist() == [100, 0]

    def test_mixed_exact_uniform(self):
        """Test exact-mode frequencies of the maximally mixed state."""
        record = simulate_counts(maximally_mixed((2,)), MeasurementSetting(("X",)), 0)
        assert record.exact
        assert np.allclose(record.counts, [0.5, 0.5])

    def test_bell_zz(self, bell_state):
        """Test exact Bell frequencies in ZZ."""
        record = simulate_counts(bell_state, MeasurementSetting(("Z", "Z")), 0)
        assert np.allclose(record.counts, [0.5, 0, 0, 0.5])

    def test_bell_correlations(self, bell_state):
        """Test exact Bell Pauli correlations."""
        table = estimate_pauli_expectations(measure_all(bell_state, 0))
        assert table.values["ZZ"] == pytest.approx(1.0)
        assert table.values["XX"] == pytest.approx(1.0)
        assert table.values["YY"] == pytest.approx(-1.0)
        assert table.values["ZI"] == pytest.approx(0.0, abs=1e-12)

    def test_exact_expectations(self, rng):
        """Test exact-mode expectations against Tr(rho P)."""
        rho = random_density(8, 3, rng, (2, 2, 2))
        table = estimate_pauli_expectations(measure_all(rho, 0))
        for label in ("XYZ", "IZX", "YIY", "ZZI"):
            expected = np.real(np.trace(rho.matrix @ pauli_string_matrix(label)))
            assert table.values[label] == pytest.approx(expected, abs=1e-12)

    def test_stderr_bound(self, bell_state):
        """Test the binomial standard error bound 1/sqrt(N)."""
        table = estimate_pauli_expectations(measure_all(bell_state, 10_000, seed=3))
        for label in ("ZI", "XZ", "YX"):
            assert table.stderrs[label] <= 1 / np.sqrt(10_000) + 1e-12
            assert abs(table.values[label]) <= 5 / np.sqrt(10_000)

    def test_seeded(self, bell_state):
        """Test that one seed reproduces the counts."""
        first = measure_all(bell_state, 100, seed=7)
        second = measure_all(bell_state, 100, seed=7)
        assert all(np.array_equal(a.counts, b.counts) for a, b in zip(first, second))

    def test_negative_shots(self, bell_state):
        """Test rejection of negative shots."""
        with pytest.raises(TomographyError):
            simulate_counts(bell_state, MeasurementSetting(("Z", "Z")), -1)

    def test_qutrits_rejected(self):
        """Test rejection of non-qubit systems."""
        with pytest.raises(TomographyError):
            measure_all(maximally_mixed((3,)), 0)

    def test_invalid_setting(self):
        """Test rejection of an unknown Pauli letter."""
        with pytest.raises(TomographyError):
            MeasurementSetting(("Q",))

    def test_bad_counts(self):
        """Test rejection of counts that do not sum to the shots."""
        with pytest.raises(TomographyError):
            CountsRecord(MeasurementSetting(("Z",)), 10, np.array([3, 4]))


class TestReconstruction:
    """Test cases for linear inversion."""

    def test_exact(self, rng):
        """Test that exact expectations invert to the state."""
        rho = random_density(4, 2, rng, (2, 2))
        result = reconstruct(estimate_pauli_expectations(measure_all(rho, 0)), target=rho)
        assert trace_distance(result.estimate.matrix, rho.matrix) <= 1e-10
        assert result.fidelity == pytest.approx(1.0, abs=1e-6)

    def test_sampled_bell(self, bell_state):
        """Test the fidelity of a sampled Bell reconstruction."""
        table = estimate_pauli_expectations(measure_all(bell_state, 10_000, seed=7))
        result = reconstruct(table, target=bell_state)
        assert result.fidelity >= 0.98
        assert result.total_shots == 10_000 * 9
        assert np.trace(result.estimate.matrix).real == pytest.approx(1.0)

    def test_incomplete_table(self):
        """Test rejection of a table missing Pauli labels."""
        table = PauliExpectations(qubit_count=1, values={"I": 1.0, "Z": 1.0}, stderrs={})
        with pytest.raises(TomographyError):
            reconstruct(table)

    def test_missing_setting(self, bell_state):
        """Test rejection of a label without a compatible setting."""
        records = [r for r in measure_all(bell_state, 0) if r.setting.label != "XY"]
        with pytest.raises(TomographyError):
            estimate_pauli_expectations(records, ["XY"])


class TestWitnessEstimation:
    """Test cases for Pauli-basis witness estimates."""

    def test_pauli_coefficients(self, bell_state):
        """Test the Pauli coefficients of the Bell projector."""
        coefficients = pauli_coefficients(bell_state.matrix, 2)
        assert coefficients["II"] == pytest.approx(0.25)
        assert coefficients["YY"] == pytest.approx(-0.25)
        assert coefficients["XZ"] == pytest.approx(0.0)

    def test_exact_matches_trace(self, robustness, bell_state, exact_model):
        """Test that exact counts reproduce Tr(W rho)."""
        witness = robustness.random_robustness(bell_state, exact_model).witness
        table = estimate_pauli_expectations(measure_all(bell_state, 0))
        estimate = witness_expectation(table, witness)
        assert estimate.estimate == pytest.approx(witness.expectation(bell_state.matrix), abs=1e-10)
        assert estimate.estimate == pytest.approx(-2.0, abs=1e-5)
        assert estimate.stderr == 0.0
        assert estimate.detected

    def test_from_state(self, robustness, bell_state, exact_model):
        """Test the witness expectation taken directly from a state."""
        witness = robustness.random_robustness(bell_state, exact_model).witness
        estimate = witness_expectation(bell_state, witness)
        assert estimate.estimate == pytest.approx(-2.0, abs=1e-5)

    def test_dimension_mismatch(self, robustness, bell_state, exact_model):
        """Test rejection of a table on the wrong qubit count."""
        witness = robustness.random_robustness(bell_state, exact_model).witness
        table = estimate_pauli_expectations(measure_all(ket_zero(3).projector(), 0))
        with pytest.raises(TomographyError):
            witness_expectation(table, witness)


class TestCountsFiles:
    """Test cases for the counts JSON-lines format."""

    def test_round_trip(self, tmp_path, bell_state):
        """Test that written counts read back unchanged."""
        records = measure_all(bell_state, 50, seed=2)
        path = write_counts_jsonl(records, tmp_path / "counts.jsonl")
        loaded = read_counts_jsonl(path)
        assert [r.setting.label for r in loaded] == [r.setting.label for r in records]
        assert all(np.array_equal(a.counts, b.counts) for a, b in zip(loaded, records))

    def test_corrupt_line(self, tmp_path):
        """Test rejection of inconsistent counts in a file."""
        path = tmp_path / "bad.jsonl"
        path.write_text('{"setting": "Z", "shots": 10, "counts": [3, 4]}\n')
        with pytest.raises(TomographyError):
            read_counts_jsonl(path)


class TestExperiment:
    """Test cases for the end-to-end experiment."""

    def setup_method(self):
        """Set up test fixtures."""
        self.family = werner_family()
        self.model = make_model(ModelKind.EXACT_TWO_QUBIT, (2, 2))

    def test_exact_mode_matches_truth(self, fast_settings, robustness):
        """Test that the exact-mode experiment reproduces the robustness."""
        service = TomographyService(fast_settings, robustness)
        rows = service.end_to_end_experiment(
            self.family, 5, 0, 0, quantifier=Quantifier.RANDOM, model=self.model
        )
        assert [row.seed for row in rows] == [0, 1, 2, 3, 4]
        for row in rows:
            # the estimate is the witness (dual) value, the truth the primal one:
            # they agree up to the accepted duality gap, not to machine precision
            tol = fast_settings.duality_gap_tol * (1 + abs(row.truth))
            assert row.estimate == pytest.approx(row.truth, abs=tol)
        assert rows[-1].truth == pytest.approx(2.0, abs=1e-5)
        assert rows[0].notes == ("reconstruction inside model",)

    def test_deterministic(self, fast_settings, robustness):
        """Test that a fixed seed reproduces the experiment."""
        service = TomographyService(fast_settings, robustness)
        runs = [
            service.end_to_end_experiment(self.family, 5, 500, 7, model=self.model)
            for _ in range(2)
        ]
        assert [(r.estimate, r.stderr) for r in runs[0]] == [(r.estimate, r.stderr) for r in runs[1]]

    @pytest.mark.asyncio
    async def test_async(self, fast_settings, robustness):
        """Test the async experiment entry point."""
        service = TomographyService(fast_settings, robustness)
        rows = await service.end_to_end_experiment_async(
            self.family, 5, 0, 3, quantifier=Quantifier.GENERALIZED, model=self.model
        )
        assert rows[-1].truth == pytest.approx(1.0, abs=1e-3)

    def test_negative_shots(self, fast_settings, robustness):
        """Test rejection of negative shots."""
        service = TomographyService(fast_settings, robustness)
        with pytest.raises(TomographyError):
            service.end_to_end_experiment(self.family, 5, -1, 0, model=self.model)
