"""
Input resolution shared by the CLI commands.

Turns a validated RunConfig into states, families and separability models.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from .config import Settings, settings
from .models.base import GeophaseError
from .models.robustness import Quantifier
from .models.state import DensityMatrix, Ket, StateError, StateFamily
from .models.witness import ModelKind, SeparabilityError, SeparabilityModel
from .schemas.matrix import KetPayload, StatePayload
from .schemas.run_config import RunConfig
from .services.separability import make_model, model_for_k
from .services.states import builtin_family, file_family

logger = logging.getLogger(__name__)


class InputError(GeophaseError):
    """Exception raised for unusable command-line input."""

    pass


def _read_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Cannot read {path}: {e}")
    if not isinstance(data, dict):
        raise InputError(f"{path} does not hold a JSON object")
    return data


def load_state_file(path: Union[str, Path]) -> Union[DensityMatrix, Ket]:
    """
    Read a density matrix ({"dim", "re", "im", "dims"}) or ket ({"dims", "re", "im"}).

    Raises:
        InputError: If the file is unreadable or not a valid state
    """
    path = Path(path)
    data = _read_json(path)
    try:
        if "dim" in data:
            return StatePayload.model_validate(data).to_state()
        return KetPayload.model_validate(data).to_ket()
    except (ValidationError, StateError) as e:
        raise InputError(f"Invalid state file {path}: {e}")


def get_state(config: RunConfig) -> DensityMatrix:
    """Density matrix for --state (kets become projectors)."""
    loaded = load_state_file(config.state)
    return loaded.projector() if isinstance(loaded, Ket) else loaded


def get_pure_state(config: RunConfig) -> Ket:
    """
    Ket for --state; density matrices must be rank one.

    Raises:
        InputError: If the state is mixed
    """
    loaded = load_state_file(config.state)
    if isinstance(loaded, Ket):
        return loaded
    eigenvalues, eigenvectors = np.linalg.eigh(loaded.matrix)
    if eigenvalues[-1] < 1 - 1e-9:
        raise InputError(
            f"Analytic witnesses need a pure state (purity {loaded.purity:.6f})"
        )
    return Ket(eigenvectors[:, -1], loaded.dims)


def get_family(config: RunConfig) -> StateFamily:
    """
    Built-in or file family.

    Raises:
        InputError: If neither is given or the family is invalid
    """
    try:
        if config.family_file is not None:
            return file_family(config.family_file)
        if config.family is not None:
            return builtin_family(config.family)
    except (ValidationError, StateError, OSError) as e:
        raise InputError(str(e))
    raise InputError(f"{config.command} needs --family or --family-file")


def get_quantifier(config: RunConfig) -> Quantifier:
    return Quantifier(config.quantifier)


def get_model(config: RunConfig, dims: Tuple[int, ...]) -> SeparabilityModel:
    """
    Model from --model, else from --k (default: full separability).

    Raises:
        InputError: If the choice does not fit the state
    """
    try:
        if config.model is not None:
            return make_model(ModelKind(config.model), dims)
        return model_for_k(dims, config.k if config.k is not None else len(dims))
    except SeparabilityError as e:
        raise InputError(str(e))


def relaxation_header(model: SeparabilityModel, k: Optional[int] = None) -> str:
    """Header line naming the relaxation that stands in for S_k."""
    descriptions = {
        ModelKind.EXACT_TWO_QUBIT: "PPT (exact for 2x2 / 2x3)",
        ModelKind.INTERSECT_PPT: "intersection of PPT sets over all cuts (outer relaxation of full separability)",
        ModelKind.MIXTURE_PPT: "convex hull of PPT sets over all cuts (outer relaxation of biseparability)",
    }
    cuts = ", ".join(cut.label for cut in model.bipartitions)
    k_text = f"k={k}: " if k is not None else ""
    return f"# model {model.tag} - {k_text}{descriptions[model.kind]}; cuts {cuts}"


def get_settings(config: RunConfig) -> Settings:
    """Per-run copy of the settings with CLI overrides applied."""
    updates = {}
    if config.kink_threshold is not None:
        updates["kink_threshold"] = config.kink_threshold
    if config.jump_threshold is not None:
        updates["witness_jump_threshold"] = config.jump_threshold
    if config.separable_tol is not None:
        updates["separable_tol"] = config.separable_tol
    if config.restarts is not None:
        updates["seesaw_restarts"] = config.restarts
    if config.workers is not None:
        updates["scan_workers"] = config.workers
    return settings.model_copy(update=updates)
