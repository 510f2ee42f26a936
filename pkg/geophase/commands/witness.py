"""
``witness`` command: optimal witness from the dual program or the seesaw.
"""

import logging

from ..dependencies import (
    get_model,
    get_pure_state,
    get_quantifier,
    get_settings,
    get_state,
    relaxation_header,
)
from ..schemas.run_config import RunConfig
from ..schemas.witness import WitnessPayload
from ..services.export import write_json
from ..services.robustness import RobustnessService
from ..services.sdp_solver import InteriorPointSolver

logger = logging.getLogger(__name__)


def cmd_witness(config: RunConfig) -> int:
    """Emit witness JSON with its certificate (SDP) or overlap bound (analytic)."""
    run_settings = get_settings(config)
    service = RobustnessService(run_settings, InteriorPointSolver(run_settings))

    if config.mode == "analytic":
        psi = get_pure_state(config)
        k = config.k if config.k is not None else len(psi.dims)
        witness, pure = service.audited_pure_witness(psi, k=k, seed=config.seed)
        print(
            f"lambda = {pure.value:.12f} over {k}-product states "
            f"(blocks {pure.structure}, {pure.restarts_used} restarts)"
        )
        if pure.value >= 1.0 - 1e-9:
            logger.warning("State not detected as entangled: witness is PSD")
            print("state not detected as entangled")
        payload = WitnessPayload.from_witness(witness, overlap_bound=pure.value)
    else:
        rho = get_state(config)
        model = get_model(config, rho.dims)
        print(relaxation_header(model, config.k))
        result = service.compute(rho, model, get_quantifier(config))
        print(f"Tr(W rho) = {result.witness.expectation(rho.matrix):.9f}")
        if result.clamped:
            print("state not detected as entangled")
        payload = WitnessPayload.from_witness(result.witness)

    if config.out:
        write_json(payload, config.out)
    else:
        print(payload.model_dump_json(indent=2))
    return 0
