"""
Configuration management using Pydantic Settings.

Loads environment variables (prefix ``GEOPHASE_``) with validation and defaults.
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical and runtime settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="GEOPHASE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Application settings
    debug: bool = Field(default=False, description="Enable debug logging")

    log_level: str = Field(
        default="WARNING", description="Log level used when debug is off"
    )

    # Interior-point solver
    sdp_feasibility_tol: float = Field(
        default=1e-8, gt=0, description="Relative primal/dual feasibility tolerance"
    )

    sdp_gap_tol: float = Field(
        default=1e-7, gt=0, description="Relative duality gap tolerance"
    )

    sdp_max_iter: int = Field(default=200, ge=1, description="Iteration cap")

    sdp_step_fraction: float = Field(
        default=0.98, gt=0, lt=1, description="Fraction-to-boundary step factor"
    )

    sdp_divergence_bound: float = Field(
        default=1e8, gt=0, description="Objective magnitude treated as divergence"
    )

    sdp_rank_tol: float = Field(
        default=1e-10, gt=0, description="Rank tolerance for redundant constraints"
    )

    sdp_dump_dir: Optional[str] = Field(
        default=None, description="Directory receiving a JSON dump of every problem"
    )

    # Separability models and certificates
    duality_gap_tol: float = Field(
        default=1e-6, gt=0, description="Accepted |primal - dual| / (1 + |primal|)"
    )

    certificate_tol: float = Field(
        default=1e-7, gt=0, description="Witness reconstruction residual bound"
    )

    psd_tol: float = Field(
        default=1e-9, gt=0, description="Negative eigenvalue slack for PSD checks"
    )

    membership_tol: float = Field(
        default=1e-6, gt=0, description="Violation slack for membership checks"
    )

    # Seesaw and witness audit
    seesaw_restarts: int = Field(default=64, ge=1, description="Random restarts")

    seesaw_tol: float = Field(
        default=1e-12, gt=0, description="Overlap change ending a seesaw run"
    )

    seesaw_max_sweeps: int = Field(default=5000, ge=1, description="Sweep cap")

    audit_samples: int = Field(
        default=10000, ge=0, description="Monte Carlo samples per witness audit"
    )

    audit_tol: float = Field(
        default=1e-8, gt=0, description="Allowed negativity on model members"
    )

    # Scan analysis
    kink_threshold: float = Field(
        default=10.0, gt=0, description="Second-difference score vs. median"
    )

    kink_noise_floor: float = Field(
        default=1e-2, gt=0, description="Lower bound on the median scale"
    )

    kink_value_floor: float = Field(
        default=1e-7, ge=0, description="Curve values below this are skipped"
    )

    kink_sigmas: float = Field(
        default=3.0, gt=0, description="Standard errors a noisy slope break must exceed"
    )

    witness_jump_threshold: float = Field(
        default=5.0, gt=0, description="Witness distance vs. median distance"
    )

    witness_jump_floor: float = Field(
        default=1e-6, ge=0, description="Absolute witness distance floor"
    )

    separable_tol: float = Field(
        default=1e-6, ge=0, description="Robustness regarded as separable"
    )

    refine_tol: float = Field(default=1e-3, gt=0, description="Kink bracket width")

    refine_withdraw_ratio: float = Field(
        default=0.25, gt=0, lt=1, description="Slope-jump decay that withdraws a kink"
    )

    scan_workers: int = Field(default=4, ge=1, description="Concurrent grid solves")

    default_grid: int = Field(default=101, ge=5, description="Default grid size")

    max_failed_fraction: float = Field(
        default=0.1, ge=0, le=1, description="Tolerated fraction of failed points"
    )

    reference_tolerance: float = Field(
        default=0.05, gt=0, description="Accepted distance to a published kink"
    )


# Global settings instance
settings = Settings()
