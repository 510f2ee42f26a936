"""
Validated command-line run configuration.

Every path and numeric range is checked here, before any solve starts.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class RunConfig(BaseModel):
    """Options shared by the robustness, scan, witness and tomo commands."""

    command: Literal["robustness", "scan", "witness", "tomo"]

    state: Optional[Path] = Field(None, description="State or ket JSON file")

    family: Optional[str] = Field(None, description="Built-in family name")

    family_file: Optional[Path] = Field(None, description="Family JSON file")

    quantifier: Literal["rr", "gr"] = Field("rr", description="Robustness flavour")

    k: Optional[int] = Field(None, ge=1, description="Number of separable blocks")

    model: Optional[Literal["exact2q", "ppt-intersect", "ppt-mixture"]] = Field(
        None, description="Relaxation, overrides k"
    )

    grid: int = Field(101, ge=5, le=100001, description="Grid points")

    shots: int = Field(0, ge=0, description="Shots per setting, 0 for exact mode")

    seed: int = Field(0, ge=0, description="Base random seed")

    out: Optional[Path] = Field(None, description="Primary output path")

    svg: Optional[Path] = Field(None, description="SVG plot path")

    kink_threshold: Optional[float] = Field(None, gt=0, description="Kink score threshold")

    jump_threshold: Optional[float] = Field(None, gt=0, description="Witness jump threshold")

    separable_tol: Optional[float] = Field(None, ge=0, description="Separable phase tolerance")

    refine: bool = Field(False, description="Refine detected kinks")

    mode: Literal["sdp", "analytic"] = Field("sdp", description="Witness construction")

    restarts: Optional[int] = Field(None, ge=1, description="Seesaw restarts")

    workers: Optional[int] = Field(None, ge=1, description="Concurrent solves")

    @field_validator("state", "family_file")
    @classmethod
    def validate_input_exists(cls, v):
        """Ensure input files exist."""
        if v is not None and not v.is_file():
            raise ValueError(f"File not found: {v}")
        return v

    @field_validator("out", "svg")
    @classmethod
    def validate_output_dir(cls, v):
        """Ensure the output directory exists."""
        if v is not None and not (v.parent if str(v.parent) else Path(".")).is_dir():
            raise ValueError(f"Output directory does not exist: {v.parent}")
        return v

    @model_validator(mode="after")
    def validate_sources(self):
        """Ensure each command receives the input it needs."""
        sources = [x for x in (self.state, self.family, self.family_file) if x is not None]
        if len(sources) > 1:
            raise ValueError("Give only one of --state, --family, --family-file")
        if self.command in ("robustness", "witness") and self.state is None:
            raise ValueError(f"{self.command} needs --state")
        if self.command in ("scan", "tomo") and self.state is not None:
            raise ValueError(f"{self.command} needs --family or --family-file")
        return self
