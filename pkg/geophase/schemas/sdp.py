"""
SDP problem dump schema.
"""

from typing import List

from pydantic import BaseModel, Field

from .matrix import MatrixPayload


class ConstraintPayload(BaseModel):
    a: List[MatrixPayload] = Field(..., description="One block per variable block")
    b: float


class SdpProblemPayload(BaseModel):
    """Debug dump of a standard-form block SDP."""

    blocks: List[int] = Field(..., description="Block sizes")

    c: List[MatrixPayload]

    constraints: List[ConstraintPayload]
