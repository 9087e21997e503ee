# spinvac/schemas/summary.py
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

PUBLISHED_SPIN_FLIP_TIME_S = 5.0e6
DISCREPANCY_FACTOR = 10.0
UNIT_CONVENTION_NOTE = (
    "The published estimate does not state its unit convention. With "
    "beta = mu0 alpha^2 hbar omega^3 / (6 pi^2 c^3) an electron at 1 T gives "
    "1/beta of about 7e10 s, so the published value cannot be reproduced from "
    "the closed-form rate in SI units."
)


class LiteratureClaims(BaseModel):
    """Computed SI spin-flip time next to the published estimate."""
    published_spin_flip_time_s: float = PUBLISHED_SPIN_FLIP_TIME_S
    computed_spin_flip_time_s: float = Field(..., gt=0.0)
    ratio: float = Field(..., description="computed / published")
    discrepancy: bool = Field(..., description="True when the ratio is outside [1/10, 10]")
    note: str = UNIT_CONVENTION_NOTE

    @classmethod
    def from_computed(cls, spin_flip_time_s: float) -> "LiteratureClaims":
        ratio = spin_flip_time_s / PUBLISHED_SPIN_FLIP_TIME_S
        return cls(
            computed_spin_flip_time_s=spin_flip_time_s,
            ratio=ratio,
            discrepancy=not (1.0 / DISCREPANCY_FACTOR <= ratio <= DISCREPANCY_FACTOR),
        )


class RunSummary(BaseModel):
    """
    Everything a run reports. ``wall_clock_s`` never enters the JSON file;
    it is written to the sidecar run.log.
    """
    config_hash: str = Field(..., min_length=64, max_length=64)
    engine: str
    units: str
    alpha: float
    omega: float
    beta_analytic: float = Field(..., ge=0.0)
    beta_fitted: Optional[float] = None
    beta_fit_stderr: Optional[float] = None
    beta_ratio: Optional[float] = Field(None, description="beta_fitted / beta_analytic")
    beta_golden_rule: Optional[float] = None
    decay_rate_convention: str
    spin_flip_time: Optional[float] = Field(None, description="1 / beta_analytic")
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    omega_shifted: Optional[float] = None
    cutoff: Optional[float] = None
    measure: Optional[str] = None
    recurrence_time: Optional[float] = None
    literature_claims: Optional[LiteratureClaims] = None
    files: Dict[str, str] = Field(default_factory=dict)
    diagnostics: Dict[str, float] = Field(default_factory=dict)
    wall_clock_s: float = Field(0.0, exclude=True)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "config_hash": "0" * 64,
                "engine": "analytic",
                "units": "natural",
                "alpha": 1.0,
                "omega": 1.0,
                "beta_analytic": 0.016886864,
                "decay_rate_convention": "natural: beta = alpha^2 omega^3 / (6 pi^2)",
                "spin_flip_time": 59.217626,
            }
        }
    )

    @model_validator(mode="after")
    def check_ratio(self) -> "RunSummary":
        if self.beta_ratio is not None and self.beta_fitted is None:
            raise ValueError("beta_ratio requires beta_fitted")
        return self
