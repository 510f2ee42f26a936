"""
Family file schema: listed (q, state) samples interpolated linearly.
"""

from typing import List

from pydantic import BaseModel, Field, field_validator

from .matrix import StatePayload


class FamilySample(BaseModel):
    q: float = Field(..., ge=0, le=1, description="Family parameter")
    state: StatePayload


class FamilyFilePayload(BaseModel):
    """Arbitrary one-parameter family given on grid states."""

    name: str = Field(..., min_length=1, description="Family name used in outputs")

    samples: List[FamilySample] = Field(..., min_length=2)

    @field_validator("samples")
    @classmethod
    def validate_endpoints(cls, v):
        """Ensure the samples cover q = 0 and q = 1."""
        qs = [s.q for s in v]
        if min(qs) > 0.0 or max(qs) < 1.0:
            raise ValueError("Samples must include q = 0 and q = 1")
        return v
