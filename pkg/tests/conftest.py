"""
Test configuration and fixtures for geophase.

Provides common states, models and service instances for pytest.
"""

import asyncio
from pathlib import Path

import numpy as np
import pytest

from geophase.config import settings
from geophase.models import DensityMatrix, ModelKind
from geophase.services.robustness import RobustnessService
from geophase.services.sdp_solver import InteriorPointSolver
from geophase.services.separability import make_model
from geophase.services.states import ket_bell, ket_ghz, ket_w, maximally_mixed

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "states"


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run acceptance-scale tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def event_loop():
    """Create an instance of the default event loop for the test session."""
    loop = asyncio.get_event_loop_policy().new_event_loop()
    yield loop
    loop.close()


@pytest.fixture
def fast_settings():
    """
    Settings with smaller audit and seesaw budgets.

    Returns:
        Settings: Copy of the global settings
    """
    return settings.model_copy(update={"audit_samples": 2000, "seesaw_restarts": 16})


@pytest.fixture
def robustness(fast_settings):
    """Robustness service bound to the fast settings."""
    return RobustnessService(fast_settings, InteriorPointSolver(fast_settings))


@pytest.fixture
def bell_state() -> DensityMatrix:
    return ket_bell().projector()


@pytest.fixture
def ghz_state() -> DensityMatrix:
    return ket_ghz(3).projector()


@pytest.fixture
def w_state() -> DensityMatrix:
    return ket_w(3).projector()


@pytest.fixture
def mixed_two_qubit() -> DensityMatrix:
    return maximally_mixed((2, 2))


@pytest.fixture
def exact_model():
    return make_model(ModelKind.EXACT_TWO_QUBIT, (2, 2))


@pytest.fixture
def intersect_model():
    return make_model(ModelKind.INTERSECT_PPT, (2, 2, 2))


@pytest.fixture
def mixture_model():
    return make_model(ModelKind.MIXTURE_PPT, (2, 2, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
