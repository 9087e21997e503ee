# tests/unit/test_shift.py

import math

import pytest

from spinvac.core.errors import DomainError
from spinvac.core.units import UnitMode, rate_prefactor
from spinvac.models.spin import SpinSystem
from spinvac.operations.shift import (
    compute_shifts,
    fit_cutoff_scaling,
    shift_closed_form,
    shift_integrals_closed_form,
    shift_quadrature,
)
from spinvac.schemas.results import ShiftMethod

C_UNIT = 1.0 / (12.0 * math.pi ** 2)


def test_closed_form_unit_point(unit_spin):
    """alpha = omega = 1, Lambda = 10."""
    result = shift_closed_form(unit_spin, 10.0)
    i1 = 1000.0 / 3.0 - 50.0 + 10.0 - math.log(11.0)
    i2 = 1000.0 / 3.0 + 50.0 + 10.0 + math.log(9.0)
    assert result.delta1 == pytest.approx(C_UNIT * i1, rel=1e-14)
    assert result.delta2 == pytest.approx(C_UNIT * i2, rel=1e-14)
    assert result.omega_shifted == 1.0 + result.delta1 - result.delta2
    assert result.method == ShiftMethod.CLOSED_FORM


@pytest.mark.parametrize("cutoff", [3.0, 10.0, 30.0], ids=["L3", "L10", "L30"])
def test_shift_difference_identity(unit_spin, cutoff):
    """delta1 - delta2 = C (-omega Lambda^2 - omega^3 ln((Lambda^2 - omega^2) / omega^2))."""
    result = shift_closed_form(unit_spin, cutoff)
    expected = C_UNIT * (-cutoff ** 2 - math.log(cutoff ** 2 - 1.0))
    assert result.delta1 - result.delta2 == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "omega, ratio",
    [(0.5, 3.0), (1.0, 10.0), (2.0, 100.0), (0.5, 100.0), (2.0, 3.0)],
    ids=["w0.5_L3", "w1_L10", "w2_L100", "w0.5_L100", "w2_L3"],
)
def test_closed_form_matches_quadrature(omega, ratio):
    """Principal-value quadrature reproduces the closed forms to 1e-6 relative."""
    spin = SpinSystem.direct(1.0, omega)
    closed = shift_closed_form(spin, ratio * omega)
    numeric = shift_quadrature(spin, ratio * omega)
    assert numeric.delta1 == pytest.approx(closed.delta1, rel=1e-6)
    assert numeric.delta2 == pytest.approx(closed.delta2, rel=1e-6)
    assert numeric.delta1 - numeric.delta2 == pytest.approx(closed.delta1 - closed.delta2, rel=1e-6)
    assert numeric.method == ShiftMethod.QUADRATURE


def test_quadrature_exclusion_window_independent(unit_spin):
    """The added sliver makes the result independent of the excluded width."""
    narrow = shift_quadrature(unit_spin, 10.0, eps_exclusion=1e-5)
    wide = shift_quadrature(unit_spin, 10.0, eps_exclusion=5e-2)
    assert narrow.delta2 == pytest.approx(wide.delta2, rel=1e-9)


def test_gap_increases_with_cutoff(unit_spin):
    gaps = [shift_closed_form(unit_spin, lam).delta2 - shift_closed_form(unit_spin, lam).delta1
            for lam in (3.0, 10.0, 30.0)]
    assert gaps[0] < gaps[1] < gaps[2]


def test_cubic_cutoff_scaling(unit_spin):
    """The leading Lambda^3 coefficient of delta2 is C / 3."""
    leading = fit_cutoff_scaling(unit_spin, [20.0, 40.0, 80.0, 160.0])
    assert leading == pytest.approx(C_UNIT / 3.0, rel=1e-3)
    with pytest.raises(DomainError):
        fit_cutoff_scaling(unit_spin, [20.0, 40.0, 80.0])


def test_coupling_scaling():
    """Shifts scale as alpha^2."""
    weak = shift_closed_form(SpinSystem.direct(0.5, 1.0), 10.0)
    strong = shift_closed_form(SpinSystem.direct(1.0, 1.0), 10.0)
    assert strong.delta2 / weak.delta2 == pytest.approx(4.0, rel=1e-14)


def test_si_prefactor():
    natural = shift_closed_form(SpinSystem.direct(1.0, 1.0), 10.0)
    si = shift_closed_form(SpinSystem.direct(1.0, 1.0, UnitMode.SI), 10.0)
    assert si.delta1 / natural.delta1 == pytest.approx(rate_prefactor(UnitMode.SI), rel=1e-14)


@pytest.mark.parametrize(
    "method, expected",
    [(ShiftMethod.CLOSED_FORM, ShiftMethod.CLOSED_FORM), ("quadrature", ShiftMethod.QUADRATURE)],
    ids=["closed_form", "quadrature"],
)
def test_compute_shifts_dispatch(unit_spin, method, expected):
    assert compute_shifts(unit_spin, 10.0, method).method == expected


@pytest.mark.parametrize(
    "omega, cutoff",
    [(1.0, 2.0), (1.0, 1.5), (0.0, 10.0)],
    ids=["cutoff_at_two_omega", "cutoff_below", "zero_omega"],
)
def test_shift_domain(omega, cutoff):
    with pytest.raises(DomainError):
        shift_integrals_closed_form(omega, cutoff)


@pytest.mark.parametrize("eps", [0.0, 0.2, -1e-3], ids=["zero", "too_wide", "negative"])
def test_quadrature_exclusion_domain(unit_spin, eps):
    with pytest.raises(DomainError):
        shift_quadrature(unit_spin, 10.0, eps_exclusion=eps)
