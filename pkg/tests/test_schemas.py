"""
Tests for JSON schemas, run configuration and input resolution.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from geophase.dependencies import InputError, get_model, load_state_file, relaxation_header
from geophase.models import Ket, ModelKind
from geophase.schemas import KetPayload, MatrixPayload, RunConfig, StatePayload
from geophase.services.separability import make_model


class TestMatrixPayloads:
    """Test cases for the matrix encodings."""

    def test_complex_entries(self):
        """Test complex entries split into real and imaginary parts."""
        matrix = np.array([[1, 1j], [-1j, 2]])
        payload = MatrixPayload.from_array(matrix)
        assert payload.re == [1.0, 0.0, 0.0, 2.0]
        assert payload.im == [0.0, 1.0, -1.0, 0.0]
        assert np.array_equal(payload.to_array(), matrix)

    def test_length_check(self):
        """Test entry count validated against dim."""
        with pytest.raises(ValidationError):
            MatrixPayload(dim=2, re=[1.0], im=[0.0])

    def test_state_dims(self):
        """Test party dimensions validated against dim."""
        with pytest.raises(ValidationError):
            StatePayload(dim=2, dims=[1, 2], re=[1, 0, 0, 0], im=[0, 0, 0, 0])

    def test_ket(self, data_dir):
        """Test loading a ket file."""
        ket = load_state_file(data_dir / "w.json")
        assert isinstance(ket, Ket)
        assert KetPayload.from_ket(ket).dims == [2, 2, 2]


class TestRunConfig:
    """Test cases for command-line validation."""

    def test_defaults(self, data_dir):
        """Test run configuration defaults."""
        config = RunConfig(command="robustness", state=data_dir / "bell.json")
        assert config.grid == 101
        assert config.quantifier == "rr"

    def test_two_sources(self, data_dir):
        """Test that a family and a state file are exclusive."""
        with pytest.raises(ValidationError):
            RunConfig(command="scan", family="werner", state=data_dir / "bell.json")

    def test_grid_range(self):
        """Test the grid size lower bound."""
        with pytest.raises(ValidationError):
            RunConfig(command="scan", family="werner", grid=4)

    def test_output_directory(self, tmp_path):
        """Test rejection of a missing output directory."""
        with pytest.raises(ValidationError):
            RunConfig(command="scan", family="werner", out=tmp_path / "missing" / "x.csv")


class TestDependencies:
    """Test cases for input resolution."""

    def test_model_override(self, data_dir):
        """Test an explicit model overriding the default."""
        config = RunConfig(command="robustness", state=data_dir / "ghz.json", model="ppt-mixture")
        assert get_model(config, (2, 2, 2)).kind is ModelKind.MIXTURE_PPT

    def test_default_k(self, data_dir):
        """Test the default model for full separability."""
        config = RunConfig(command="robustness", state=data_dir / "ghz.json")
        assert get_model(config, (2, 2, 2)).kind is ModelKind.INTERSECT_PPT

    def test_bad_k(self, data_dir):
        """Test rejection of k below 2."""
        config = RunConfig(command="robustness", state=data_dir / "ghz.json", k=1)
        with pytest.raises(InputError):
            get_model(config, (2, 2, 2))

    def test_header(self):
        """Test the relaxation header line."""
        header = relaxation_header(make_model(ModelKind.MIXTURE_PPT, (2, 2, 2)), 2)
        assert header.startswith("# model ppt-mixture - k=2:")
        assert header.endswith("cuts A|BC, AB|C, AC|B")
