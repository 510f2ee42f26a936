"""
Kink report and scan summary JSON schemas.
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from ..models.scan import KinkReport, ScanResult


class KinkPayload(BaseModel):
    """One detected kink."""

    location: float = Field(..., ge=0, le=1, description="Kink location q*")

    left_slope: float

    right_slope: float

    score: float = Field(..., description="Second-difference score over the median")

    refined: bool = False

    corroborated: Optional[bool] = Field(None, description="Inside a witness-jump interval")

    reference: Optional[float] = Field(None, description="Published location, if any")

    deviation: Optional[float] = None

    diagnostic: Optional[str] = None

    candidates: List[float] = Field(default_factory=list, description="Grid points tried by refinement")

    @classmethod
    def from_report(cls, kink: KinkReport) -> "KinkPayload":
        return cls(**vars(kink))


class PhasePayload(BaseModel):
    label: str
    q_start: float
    q_end: float


class ScanSummaryPayload(BaseModel):
    """Kink JSON written next to the scan CSV."""

    family: str

    quantifier: str

    model: str

    grid_points: int

    kinks: List[KinkPayload]

    phases: List[PhasePayload]

    lipschitz: float = Field(..., description="max |f(q+h) - f(q)| / h")

    failures: List[str] = Field(default_factory=list)

    @classmethod
    def from_result(cls, result: ScanResult) -> "ScanSummaryPayload":
        return cls(
            family=result.family,
            quantifier=result.quantifier.value,
            model=result.model,
            grid_points=len(result.grid),
            kinks=[KinkPayload.from_report(k) for k in result.kinks],
            phases=[PhasePayload(**vars(p)) for p in result.phases],
            lipschitz=result.lipschitz,
            failures=result.failures,
        )
