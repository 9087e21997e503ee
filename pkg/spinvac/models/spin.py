# spinvac/models/spin.py
from dataclasses import dataclass

from spinvac.core.errors import DomainError
from spinvac.core.units import UnitMode, UnitSystem, decay_rate, larmor_frequency


@dataclass(frozen=True)
class SpinSystem:
    """
    A spin-1/2 moment in the static laboratory field B_L along z.

    ``alpha`` is the charge-to-mass coupling |e|/m and ``omega`` the Larmor
    frequency alpha * B_L. Use the ``create`` and ``direct`` factories rather
    than the constructor so the invariants are checked.
    """
    charge_magnitude: float
    mass: float
    lab_field: float
    alpha: float
    omega: float
    units: UnitMode = UnitMode.NATURAL

    @classmethod
    def create(cls, charge_magnitude: float, mass: float, lab_field: float,
               units: UnitMode = UnitMode.NATURAL) -> "SpinSystem":
        """Build a spin system from particle charge, mass and the lab field."""
        # validates mass and field; omega is then alpha * B_L exactly
        larmor_frequency(charge_magnitude, mass, lab_field)
        alpha = abs(charge_magnitude) / mass
        return cls(
            charge_magnitude=abs(charge_magnitude),
            mass=mass,
            lab_field=lab_field,
            alpha=alpha,
            omega=alpha * lab_field,
            units=UnitMode(units),
        )

    @classmethod
    def direct(cls, alpha: float, omega: float,
               units: UnitMode = UnitMode.NATURAL) -> "SpinSystem":
        """
        Build a spin system from the coupling and the Larmor frequency.

        The particle is represented with unit mass, so charge = alpha and
        B_L = omega / alpha (or 0 when the coupling is switched off).
        """
        if alpha < 0:
            raise DomainError(f"alpha must be non-negative, got {alpha}")
        if omega < 0:
            raise DomainError(f"omega must be non-negative, got {omega}")
        lab_field = omega / alpha if alpha > 0 else 0.0
        return cls(
            charge_magnitude=alpha,
            mass=1.0,
            lab_field=lab_field,
            alpha=alpha,
            omega=omega,
            units=UnitMode(units),
        )

    @property
    def unit_system(self) -> UnitSystem:
        return UnitSystem(mode=self.units)

    @property
    def hbar(self) -> float:
        return self.unit_system.hbar

    @property
    def hbar_half(self) -> float:
        return 0.5 * self.hbar

    @property
    def beta(self) -> float:
        return decay_rate(self.alpha, self.omega, self.units)

    def with_coupling(self, alpha: float) -> "SpinSystem":
        """Same Larmor frequency, different coupling."""
        return SpinSystem.direct(alpha, self.omega, self.units)

    def __repr__(self):
        return f"<SpinSystem(alpha={self.alpha:.6g}, omega={self.omega:.6g}, units={self.units.value})>"
