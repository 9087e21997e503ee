# spinvac/core/units.py

"""
Module: units.py

Unit system, CODATA 2018 constants and the closed-form Larmor frequency and
spontaneous decay rate that every other module derives its scales from.

Internal computation is done in Natural units (hbar = c = 1, unit vacuum
prefactor). In that system the decay rate reads

    beta = alpha^2 * omega^3 / (6 pi^2)

SI reporting uses the dimensionally consistent completion

    beta_SI = mu0 * alpha^2 * hbar * omega^3 / (6 pi^2 c^3)

which coincides with the c^5 form under eps0 = 1, mu0 = 1/c^2.
"""

import math
from dataclasses import dataclass
from enum import Enum

from spinvac.core.errors import DomainError


class UnitMode(str, Enum):
    """Enumeration of the supported unit systems."""
    NATURAL = "natural"
    SI = "si"


class QuantityKind(str, Enum):
    """Physical dimension of a quantity handed to UnitSystem conversions."""
    TIME = "time"
    FREQUENCY = "frequency"
    RATE = "rate"
    LENGTH = "length"
    ENERGY = "energy"
    MASS = "mass"
    ANGULAR_MOMENTUM = "angular_momentum"


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, SI units, full published precision."""
    HBAR: float = 1.054571817e-34          # J s
    C: float = 299792458.0                 # m / s
    MU0: float = 1.25663706212e-6          # N / A^2
    EPS0: float = 8.8541878128e-12         # F / m
    E_CHARGE: float = 1.602176634e-19      # C
    M_ELECTRON: float = 9.1093837015e-31   # kg

    def __post_init__(self):
        assert self.HBAR > 0, "HBAR must be positive"
        assert self.C > 0, "C must be positive"


CONSTANTS = PhysicalConstants()

GAUSS_PER_TESLA = 1.0e4


@dataclass(frozen=True)
class UnitSystem:
    """
    A unit system plus the scale that ties Natural units to SI.

    In Natural mode hbar = c = 1 and the natural time unit is ``time_unit_s``
    seconds; lengths, energies and masses follow from hbar and c.
    """
    mode: UnitMode = UnitMode.NATURAL
    time_unit_s: float = 1.0

    @property
    def hbar(self) -> float:
        return 1.0 if self.mode == UnitMode.NATURAL else CONSTANTS.HBAR

    @property
    def c(self) -> float:
        return 1.0 if self.mode == UnitMode.NATURAL else CONSTANTS.C

    def _si_factor(self, kind: QuantityKind) -> float:
        t0 = self.time_unit_s
        factors = {
            QuantityKind.TIME: t0,
            QuantityKind.FREQUENCY: 1.0 / t0,
            QuantityKind.RATE: 1.0 / t0,
            QuantityKind.LENGTH: CONSTANTS.C * t0,
            QuantityKind.ENERGY: CONSTANTS.HBAR / t0,
            QuantityKind.MASS: CONSTANTS.HBAR / (t0 * CONSTANTS.C ** 2),
            QuantityKind.ANGULAR_MOMENTUM: CONSTANTS.HBAR,
        }
        return factors[QuantityKind(kind)]

    def to_si(self, value: float, kind: QuantityKind) -> float:
        """Express a Natural-unit quantity in SI."""
        if self.mode == UnitMode.SI:
            return value
        return value * self._si_factor(kind)

    def from_si(self, value: float, kind: QuantityKind) -> float:
        """Express an SI quantity in this unit system."""
        if self.mode == UnitMode.SI:
            return value
        return value / self._si_factor(kind)


def rate_prefactor(mode: UnitMode) -> float:
    """The factor K in beta = K alpha^2 omega^3 / (6 pi^2): 1 or mu0 hbar / c^3."""
    if UnitMode(mode) == UnitMode.NATURAL:
        return 1.0
    return CONSTANTS.MU0 * CONSTANTS.HBAR / CONSTANTS.C ** 3


def decay_rate_convention(mode: UnitMode) -> str:
    if UnitMode(mode) == UnitMode.NATURAL:
        return "natural: beta = alpha^2 omega^3 / (6 pi^2)"
    return "si: beta = mu0 alpha^2 hbar omega^3 / (6 pi^2 c^3)"


def larmor_frequency(charge_magnitude: float, mass: float, lab_field: float) -> float:
    """
    Larmor angular frequency |e| B_L / m in whatever units the inputs carry.

    Raises:
    - DomainError: if mass is not positive or the field is negative.

    Example:
    >>> round(larmor_frequency(1.602176634e-19, 9.1093837015e-31, 1.0) / 1e11, 5)
    1.75882
    """
    if mass <= 0:
        raise DomainError(f"mass must be positive, got {mass}")
    if lab_field < 0:
        raise DomainError(f"lab_field must be non-negative, got {lab_field}")
    return abs(charge_magnitude) * lab_field / mass


def decay_rate(alpha: float, omega: float, mode: UnitMode = UnitMode.NATURAL) -> float:
    """
    Spontaneous spin-flip rate beta for coupling alpha at Larmor frequency omega.

    Example:
    >>> round(decay_rate(1.0, 1.0), 8)
    0.01688686
    """
    if omega < 0:
        raise DomainError(f"omega must be non-negative, got {omega}")
    return rate_prefactor(mode) * alpha ** 2 * omega ** 3 / (6.0 * math.pi ** 2)


def shift_prefactor(alpha: float, mode: UnitMode = UnitMode.NATURAL) -> float:
    """The constant C = K alpha^2 / (12 pi^2) in front of both shift integrals."""
    return rate_prefactor(mode) * alpha ** 2 / (12.0 * math.pi ** 2)
