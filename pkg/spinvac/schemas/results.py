# spinvac/schemas/results.py
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class KernelBranch(str, Enum):
    """Frequency combination of a kernel integral: omega_k - omega, omega_k + omega or omega_k."""
    MINUS = "minus"
    PLUS = "plus"
    ZERO = "zero"


class ShiftMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class KernelAsymptote(BaseModel):
    """
    Large-time replacement of a kernel integral as a distributional pair.

    The kernel tends to ``1j * principal_part + delta_weight * delta(detuning)``.
    """
    principal_part: float = Field(..., description="Coefficient multiplying i in the principal-value term")
    delta_weight: float = Field(..., ge=0.0, description="Weight of the delta-function term")

    model_config = ConfigDict(frozen=True)

    def pointwise(self) -> complex:
        """The principal-value part as a complex number, off resonance."""
        return 1j * self.principal_part


class ShiftResult(BaseModel):
    """Radiative frequency shifts for a cutoff Lambda."""
    delta1: float = Field(..., description="Counter-rotating shift")
    delta2: float = Field(..., description="Resonant-branch shift")
    omega: float = Field(..., ge=0.0, description="Unshifted Larmor frequency")
    omega_shifted: float = Field(..., description="omega + delta1 - delta2")
    cutoff: float = Field(..., gt=0.0)
    method: ShiftMethod

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "delta1": 2.4, "delta2": 2.6, "omega": 1.0,
                "omega_shifted": 0.8, "cutoff": 10.0, "method": "closed_form",
            }
        },
    )

    @model_validator(mode="after")
    def check_shifted_frequency(self) -> "ShiftResult":
        expected = self.omega + self.delta1 - self.delta2
        if self.omega_shifted != expected:
            raise ValueError(f"omega_shifted must equal omega + delta1 - delta2 = {expected!r}")
        return self


class MarkovianSolution(BaseModel):
    """Closed-form Markovian parameters fixed by the initial condition."""
    beta: float = Field(..., ge=0.0)
    omega: float = Field(..., ge=0.0)
    delta1: float = 0.0
    delta2: float = 0.0
    omega_shifted: float
    A: float = Field(..., description="sz0 + hbar/2")
    B_re: float = Field(..., description="Real part of splus0")
    B_im: float = Field(..., description="Imaginary part of splus0")
    hbar: float = Field(1.0, gt=0.0)
    cutoff: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @property
    def B(self) -> complex:
        return complex(self.B_re, self.B_im)

    @model_validator(mode="after")
    def check_shifted_frequency(self) -> "MarkovianSolution":
        if self.omega_shifted != self.omega + self.delta1 - self.delta2:
            raise ValueError("omega_shifted must equal omega + delta1 - delta2")
        return self


class DecayFit(BaseModel):
    """Least-squares fit of sz(t) to A exp(-beta t) - hbar/2."""
    beta: float
    amplitude: float
    residual_norm: float = Field(..., ge=0.0)
    beta_stderr: float = Field(..., ge=0.0, description="One-sigma error from the fit covariance")
    window: List[float] = Field(..., min_length=2, max_length=2)
    n_points: int = Field(..., ge=3)

    model_config = ConfigDict(frozen=True)


class VerificationCheck(BaseModel):
    """One named check with its tolerance and the value achieved."""
    name: str
    suite: str
    tolerance: float
    achieved: float
    passed: bool
    details: Dict[str, object] = Field(default_factory=dict)

    @field_validator("achieved", mode="before")
    @classmethod
    def finite_or_infinite(cls, v):
        # NaN never passes
        if v != v:
            return float("inf")
        return v


class VerificationReport(BaseModel):
    suite: str
    passed: bool
    checks: List[VerificationCheck]

    @model_validator(mode="after")
    def consistent_status(self) -> "VerificationReport":
        if self.passed != all(c.passed for c in self.checks):
            raise ValueError("passed must agree with the individual checks")
        return self


class ConvergenceLadder(BaseModel):
    """Spectral radiation-reaction field against the local one along an epsilon ladder."""
    t: float
    epsilons: List[float] = Field(..., min_length=2)
    local: List[float] = Field(..., min_length=3, max_length=3)
    spectral: List[List[float]]
    residuals: List[float] = Field(..., description="|spectral - local| / |local| per epsilon")
    order: float = Field(..., description="Fitted exponent of residual ~ epsilon^order")
    monotone: bool
