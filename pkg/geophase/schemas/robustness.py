"""
Robustness result JSON schema.
"""

from typing import Optional

from pydantic import BaseModel, Field

from ..models.robustness import RobustnessResult
from .matrix import StatePayload
from .witness import WitnessPayload


class RobustnessPayload(BaseModel):
    """Certified robustness value with its witness and boundary state."""

    quantifier: str = Field(..., description="rr or gr")

    model: str = Field(..., description="Separability model tag")

    value: float = Field(..., ge=0, description="Certified robustness s")

    dual_value: float = Field(..., description="Witness-program bound")

    gap: float = Field(..., ge=0, description="|primal - dual|")

    status: str = Field(..., description="Solver status")

    clamped: bool = Field(False, description="Optimum within separable_tol of zero reported as 0")

    witness: WitnessPayload

    boundary_state: StatePayload

    optimal_noise: Optional[StatePayload] = None

    @classmethod
    def from_result(cls, result: RobustnessResult) -> "RobustnessPayload":
        return cls(
            quantifier=result.quantifier.value,
            model=result.model,
            value=result.value,
            dual_value=result.dual_value,
            gap=result.gap,
            status=result.status.value,
            clamped=result.clamped,
            witness=WitnessPayload.from_witness(result.witness),
            boundary_state=StatePayload.from_state(result.boundary_state),
            optimal_noise=None
            if result.optimal_noise is None
            else StatePayload.from_state(result.optimal_noise),
        )
