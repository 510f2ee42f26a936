"""
``robustness`` command: certified robustness of one state.
"""

import logging

from ..dependencies import get_model, get_quantifier, get_settings, get_state, relaxation_header
from ..schemas.robustness import RobustnessPayload
from ..schemas.run_config import RunConfig
from ..services.export import write_json
from ..services.robustness import RobustnessService
from ..services.sdp_solver import InteriorPointSolver

logger = logging.getLogger(__name__)


def cmd_robustness(config: RunConfig) -> int:
    """Solve both programs, print the summary and write the result JSON."""
    run_settings = get_settings(config)
    rho = get_state(config)
    model = get_model(config, rho.dims)
    quantifier = get_quantifier(config)
    print(relaxation_header(model, config.k))

    service = RobustnessService(run_settings, InteriorPointSolver(run_settings))
    result = service.compute(rho, model, quantifier)
    payload = RobustnessPayload.from_result(result)

    print(
        f"{quantifier.value} = {result.value:.9f}  dual = {result.dual_value:.9f}  "
        f"gap = {result.gap:.2e}  status = {result.status.value}"
    )
    if result.clamped:
        print("state lies inside the model; value clamped to 0")
    if config.out:
        write_json(payload, config.out)
    else:
        print(payload.model_dump_json(indent=2))
    return 0
