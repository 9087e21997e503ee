# spinvac/schemas/config.py
import hashlib
import json
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from spinvac.core.units import UnitMode
from spinvac.schemas.results import ShiftMethod


class Engine(str, Enum):
    """Enumeration of the engines a run can dispatch."""
    ANALYTIC = "analytic"
    EXACT = "exact"
    BOTH = "both"


class BathKind(str, Enum):
    RESONANT = "resonant"
    BROADBAND = "broadband"


class EvolutionMethod(str, Enum):
    AUTO = "auto"
    DENSE = "dense"
    KRYLOV = "krylov"
    ODE = "ode"


class VerifySuite(str, Enum):
    GEOMETRY = "geometry"
    KERNEL = "kernel"
    SHIFT = "shift"
    RR = "rr"
    ORACLE = "oracle"
    ALL = "all"


PARTICLE_KEYS = ("charge", "mass", "b_field")
DIRECT_KEYS = ("alpha", "omega")
SWEEPABLE_KEYS = (
    "alpha", "omega", "charge", "mass", "b_field", "coupling_scale", "cutoff",
    "t_max", "t_max_decay_times", "sz0", "splus0_re", "splus0_im", "theta", "phi",
    "n_freq", "n_angular", "n_max", "n_samples", "window_min", "window_max",
)


def _present(values: Dict[str, Any], keys) -> List[str]:
    return [k for k in keys if values.get(k) is not None]


def cross_field_problems(values: Dict[str, Any]) -> List[Tuple[str, str]]:
    """
    Every violated cross-field invariant as (key, message).

    Works on raw values so a parser can report these together with
    field-level errors.
    """
    problems: List[Tuple[str, str]] = []
    particle = _present(values, PARTICLE_KEYS)
    direct = _present(values, DIRECT_KEYS)
    if particle and direct:
        problems.append((
            direct[0],
            f"conflicts with {', '.join(particle)}; give either (charge, mass, b_field) or (alpha, omega)",
        ))
    elif not particle and not direct:
        problems.append(("alpha", "no spin parameters; give either (charge, mass, b_field) or (alpha, omega)"))
    elif particle and len(particle) < len(PARTICLE_KEYS):
        missing = [k for k in PARTICLE_KEYS if k not in particle]
        problems.append((missing[0], "missing; (charge, mass, b_field) must be given together"))
    elif direct and len(direct) < len(DIRECT_KEYS):
        missing = [k for k in DIRECT_KEYS if k not in direct]
        problems.append((missing[0], "missing; (alpha, omega) must be given together"))

    engine = str(values.get("engine") or Engine.ANALYTIC.value)
    units = str(values.get("units") or UnitMode.NATURAL.value)
    if engine in (Engine.EXACT.value, Engine.BOTH.value) and units == UnitMode.SI.value:
        problems.append(("engine", "the exact engine runs in natural units only"))

    has_state = _present(values, ("sz0", "splus0_re", "splus0_im"))
    if has_state and values.get("theta") is not None:
        problems.append(("theta", f"conflicts with {', '.join(has_state)}; give a Bloch vector or angles, not both"))

    wmin, wmax = values.get("window_min"), values.get("window_max")
    if wmin is not None and wmax is not None and not wmin < wmax:
        problems.append(("window_max", f"must exceed window_min = {wmin}"))

    if engine in (Engine.EXACT.value, Engine.BOTH.value) and has_state:
        sz0 = values.get("sz0") or 0.0
        sp = complex(values.get("splus0_re") or 0.0, values.get("splus0_im") or 0.0)
        if not math.isclose(sz0 ** 2 + abs(sp) ** 2, 0.25, rel_tol=1e-9, abs_tol=1e-12):
            problems.append(("sz0", "the exact engine needs a pure spin state: sz0^2 + |splus0|^2 = (hbar/2)^2"))
    return problems


class SimulationConfig(BaseModel):
    """
    A validated run configuration. Keys are flat; see parse_config for the text format.

    Exactly one of (charge, mass, b_field) or (alpha, omega) is given.
    """
    engine: Engine = Field(Engine.ANALYTIC, description="Engine(s) to run")
    units: UnitMode = Field(UnitMode.NATURAL, description="natural (hbar = c = 1) or si")

    charge: Optional[float] = Field(None, description="Particle charge magnitude")
    mass: Optional[float] = Field(None, gt=0.0, description="Particle mass")
    b_field: Optional[float] = Field(None, ge=0.0, description="Laboratory field B_L")
    alpha: Optional[float] = Field(None, ge=0.0, description="Coupling |e|/m")
    omega: Optional[float] = Field(None, ge=0.0, description="Larmor frequency")
    coupling_scale: float = Field(1.0, gt=0.0, description="Multiplies alpha in every engine")

    bath: BathKind = BathKind.RESONANT
    n_freq: int = Field(6, ge=1, description="Frequency nodes (ladder levels for the resonant bath)")
    n_angular: int = Field(1, ge=1)
    window_min: float = Field(0.2, gt=0.0, description="Broadband window start in units of omega")
    window_max: float = Field(5.0, gt=0.0, description="Broadband window end in units of omega")
    panel_order: Optional[int] = Field(None, ge=1, description="Defaults to 1 (resonant) or 4 (broadband)")
    measure: str = Field("rate_matched", description="rate_matched or literal mode measure")
    n_max: int = Field(1, ge=1, description="Photons per mode")
    rotating_wave: bool = False

    cutoff: Optional[float] = Field(None, gt=0.0, description="Shift cutoff Lambda; shifts skipped when absent")
    shift_method: ShiftMethod = ShiftMethod.CLOSED_FORM

    t_max: Optional[float] = Field(None, gt=0.0)
    t_max_decay_times: float = Field(10.0, gt=0.0, description="Default t_max in units of 1/beta")
    n_samples: int = Field(201, ge=2)

    sz0: Optional[float] = Field(None, ge=-0.5, le=0.5, description="Initial <S_z> in units of hbar")
    splus0_re: Optional[float] = Field(None, description="Initial Re<S_+> in units of hbar")
    splus0_im: Optional[float] = Field(None, description="Initial Im<S_+> in units of hbar")
    theta: Optional[float] = Field(None, description="Polar angle of the initial spin; default 0 (up)")
    phi: float = 0.0

    rtol: float = Field(1e-10, gt=0.0)
    norm_tolerance: float = Field(1e-10, gt=0.0)
    evolution_method: EvolutionMethod = EvolutionMethod.AUTO

    output_dir: Optional[str] = None
    seed: int = 0
    dimension_cap: Optional[int] = Field(None, ge=2)

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "examples": [
                {"engine": "analytic", "alpha": 1.0, "omega": 1.0},
                {"engine": "analytic", "units": "si", "charge": 1.602176634e-19,
                 "mass": 9.1093837015e-31, "b_field": 1.0},
            ]
        },
    )

    @field_validator("measure")
    @classmethod
    def validate_measure(cls, v):
        allowed = {"rate_matched", "literal"}
        if v not in allowed:
            raise ValueError(f"measure must be one of: {', '.join(sorted(allowed))}")
        return v

    @model_validator(mode="after")
    def validate_consistency(self) -> "SimulationConfig":
        problems = cross_field_problems(self.model_dump(mode="json"))
        if problems:
            raise ValueError("; ".join(f"{key}: {message}" for key, message in problems))
        return self

    @property
    def uses_particle(self) -> bool:
        return self.charge is not None

    @property
    def runs_analytic(self) -> bool:
        return self.engine in (Engine.ANALYTIC, Engine.BOTH)

    @property
    def runs_exact(self) -> bool:
        return self.engine in (Engine.EXACT, Engine.BOTH)

    def initial_angles(self) -> Tuple[float, float]:
        """(theta, phi) of the initial spin, from angles or from a pure Bloch vector."""
        if self.sz0 is None and self.splus0_re is None and self.splus0_im is None:
            return (self.theta or 0.0), self.phi
        sz0 = self.sz0 or 0.0
        splus0 = complex(self.splus0_re or 0.0, self.splus0_im or 0.0)
        theta = math.acos(max(-1.0, min(1.0, 2.0 * sz0)))
        phi = math.atan2(splus0.imag, splus0.real) if splus0 != 0 else 0.0
        return theta, phi

    def initial_bloch(self, hbar: float = 1.0) -> Tuple[float, complex]:
        """(sz0, splus0) of the initial spin."""
        if self.sz0 is None and self.splus0_re is None and self.splus0_im is None:
            theta, phi = self.initial_angles()
            return (0.5 * hbar * math.cos(theta),
                    0.5 * hbar * math.sin(theta) * complex(math.cos(phi), math.sin(phi)))
        return (self.sz0 or 0.0) * hbar, complex(self.splus0_re or 0.0, self.splus0_im or 0.0) * hbar

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form, output_dir excluded."""
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
