"""
Counts record JSON-lines schema.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, Field

from ..models.tomography import CountsRecord, MeasurementSetting


class CountsRecordPayload(BaseModel):
    """One setting's outcome counts; shots == 0 stores exact probabilities."""

    setting: str = Field(..., min_length=1, description="Pauli axes, e.g. XZY")

    shots: int = Field(..., ge=0, description="Shots, 0 for exact mode")

    counts: List[float] = Field(..., description="Per-outcome counts (probabilities when exact)")

    @classmethod
    def from_record(cls, record: CountsRecord) -> "CountsRecordPayload":
        counts = record.counts.tolist() if record.exact else [int(c) for c in record.counts]
        return cls(setting=record.setting.label, shots=record.shots, counts=counts)

    def to_record(self) -> CountsRecord:
        counts = np.asarray(self.counts, dtype=float)
        if self.shots:
            counts = counts.astype(np.int64)
        return CountsRecord(MeasurementSetting(tuple(self.setting)), self.shots, counts)
