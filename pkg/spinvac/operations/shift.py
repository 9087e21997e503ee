# spinvac/operations/shift.py

"""
Cutoff-regularized radiative frequency shifts.

    delta1 = C P int_0^Lambda x^3 / (x + omega) dx
    delta2 = C P int_0^Lambda x^3 / (x - omega) dx

with C = K alpha^2 / (12 pi^2). The cutoff Lambda is an explicit input and
must exceed 2 omega; no renormalization is applied.
"""

import logging
import math
from typing import Iterable, Optional

import numpy as np
from scipy.integrate import quad

from spinvac.core.errors import DomainError
from spinvac.core.units import shift_prefactor
from spinvac.models.spin import SpinSystem
from spinvac.schemas.results import ShiftMethod, ShiftResult

logger = logging.getLogger(__name__)

QUAD_OPTIONS = dict(epsabs=0.0, epsrel=1e-12, limit=400)


def _check_cutoff(omega: float, cutoff: float) -> None:
    if omega <= 0:
        raise DomainError(f"omega must be positive for shift evaluation, got {omega}")
    if cutoff <= 2.0 * omega:
        raise DomainError(f"cutoff must exceed 2 omega = {2.0 * omega}, got {cutoff}")


def shift_integrals_closed_form(omega: float, cutoff: float):
    """Both principal-value integrals without the prefactor C."""
    _check_cutoff(omega, cutoff)
    lam = cutoff
    common = lam ** 3 / 3.0 + omega ** 2 * lam
    i1 = common - omega * lam ** 2 / 2.0 - omega ** 3 * math.log((lam + omega) / omega)
    i2 = common + omega * lam ** 2 / 2.0 + omega ** 3 * math.log((lam - omega) / omega)
    return i1, i2


def shift_closed_form(spin: SpinSystem, cutoff: float) -> ShiftResult:
    """
    Closed-form delta1, delta2 and the shifted frequency.

    Raises:
    - DomainError: if cutoff <= 2 omega or omega <= 0.
    """
    i1, i2 = shift_integrals_closed_form(spin.omega, cutoff)
    c = shift_prefactor(spin.alpha, spin.units)
    delta1, delta2 = c * i1, c * i2
    return ShiftResult(
        delta1=delta1,
        delta2=delta2,
        omega=spin.omega,
        omega_shifted=spin.omega + delta1 - delta2,
        cutoff=cutoff,
        method=ShiftMethod.CLOSED_FORM,
    )


def shift_quadrature(spin: SpinSystem, cutoff: float,
                     eps_exclusion: Optional[float] = None) -> ShiftResult:
    """
    Quadrature oracle for the shifts.

    The resonant integral excludes the symmetric window |x - omega| < eps and
    adds the window's exact principal value 6 omega^2 eps + 2 eps^3 / 3.
    The default eps is 1e-4 omega.

    Raises:
    - DomainError: if cutoff <= 2 omega or eps is outside (0, omega / 10).
    """
    omega = spin.omega
    _check_cutoff(omega, cutoff)
    eps = 1e-4 * omega if eps_exclusion is None else eps_exclusion
    if not 0 < eps < omega / 10.0:
        raise DomainError(f"eps_exclusion must lie in (0, omega/10) = (0, {omega / 10.0}), got {eps}")
    if omega - eps <= 0 or omega + eps >= cutoff:
        raise DomainError("Exclusion window touches the integration limits")

    i1, _ = quad(lambda x: x ** 3 / (x + omega), 0.0, cutoff, **QUAD_OPTIONS)
    below, _ = quad(lambda x: x ** 3 / (x - omega), 0.0, omega - eps, **QUAD_OPTIONS)
    above, _ = quad(lambda x: x ** 3 / (x - omega), omega + eps, cutoff, **QUAD_OPTIONS)
    sliver = 6.0 * omega ** 2 * eps + 2.0 * eps ** 3 / 3.0
    i2 = below + above + sliver

    c = shift_prefactor(spin.alpha, spin.units)
    delta1, delta2 = c * i1, c * i2
    logger.debug(f"Shift quadrature at cutoff {cutoff}, eps {eps}: delta1={delta1}, delta2={delta2}")
    return ShiftResult(
        delta1=delta1,
        delta2=delta2,
        omega=omega,
        omega_shifted=omega + delta1 - delta2,
        cutoff=cutoff,
        method=ShiftMethod.QUADRATURE,
    )


def compute_shifts(spin: SpinSystem, cutoff: float,
                   method: ShiftMethod = ShiftMethod.CLOSED_FORM) -> ShiftResult:
    if ShiftMethod(method) == ShiftMethod.QUADRATURE:
        return shift_quadrature(spin, cutoff)
    return shift_closed_form(spin, cutoff)


def fit_cutoff_scaling(spin: SpinSystem, cutoffs: Iterable[float]) -> float:
    """
    Leading Lambda^3 coefficient of delta2(Lambda) from a cubic fit.

    For large cutoffs it approaches C / 3.
    """
    lambdas = np.asarray(list(cutoffs), dtype=float)
    if lambdas.size < 4:
        raise DomainError("A cubic fit needs at least four cutoffs")
    delta2 = np.array([shift_closed_form(spin, lam).delta2 for lam in lambdas])
    coefficients = np.polyfit(lambdas, delta2, 3)
    return float(coefficients[0])
