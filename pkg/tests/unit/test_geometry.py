# tests/unit/test_geometry.py

import math
from dataclasses import replace

import numpy as np
import pytest

from spinvac.core.errors import DomainError
from spinvac.core.units import UnitMode
from spinvac.models.modes import MODE_CSV_COLUMNS, ModeSet
from spinvac.models.spin import SpinSystem
from spinvac.operations.geometry import (
    angular_nodes,
    angular_polarization_integral,
    build_mode_set,
    frequency_quadrature,
    golden_rule_rate,
    local_spacing,
    polarization_basis,
    resonant_window,
    shell_moment,
)

EIGHT_PI_THIRDS = 8.0 * math.pi / 3.0


# ---------------------------------------------
# Polarization basis
# ---------------------------------------------

@pytest.mark.parametrize(
    "k_hat",
    [
        (0.0, 0.0, 1.0),
        (0.0, 0.0, -1.0),
        (1.0, 0.0, 0.0),
        (1.0 / math.sqrt(3.0),) * 3,
        (0.6, 0.0, 0.8),
    ],
    ids=["plus_z", "minus_z", "x", "diagonal", "xz_plane"],
)
def test_polarization_basis_orthonormal(k_hat):
    """{e1, e2, k_hat} is orthonormal and right-handed."""
    basis = polarization_basis(k_hat)
    frame = np.stack([basis.e1, basis.e2, basis.k_hat])
    assert np.allclose(frame @ frame.T, np.eye(3), atol=1e-14)
    assert np.allclose(np.cross(basis.e1, basis.e2), basis.k_hat, atol=1e-14)
    assert basis.vector(1) is basis.e1
    assert basis.vector(2) is basis.e2


@pytest.mark.parametrize(
    "k_hat",
    [(0.0, 0.0, 1.1), (0.0, 0.0, 0.0), (1.0, 0.0), (math.nan, 0.0, 1.0)],
    ids=["too_long", "zero", "wrong_shape", "nan"],
)
def test_polarization_basis_domain(k_hat):
    with pytest.raises(DomainError):
        polarization_basis(k_hat)


@pytest.mark.parametrize(
    "k_hat",
    [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (0.6, 0.0, 0.8), (1.0 / math.sqrt(3.0),) * 3],
    ids=["plus_z", "minus_z", "xz_plane", "diagonal"],
)
def test_polarization_basis_stable_under_perturbation(k_hat, rng):
    """Nudging k_hat by less than 1e-13 moves the basis by less than 1e-12."""
    basis = polarization_basis(k_hat)
    for _ in range(5):
        nudged = polarization_basis(np.asarray(k_hat) + 5e-14 * rng.uniform(-1.0, 1.0, 3))
        assert np.allclose(nudged.e1, basis.e1, rtol=0, atol=1e-12)
        assert np.allclose(nudged.e2, basis.e2, rtol=0, atol=1e-12)


# ---------------------------------------------
# Angular identity
# ---------------------------------------------

@pytest.mark.parametrize(
    "i, j, expected",
    [
        ("x", "x", EIGHT_PI_THIRDS),
        ("y", "y", EIGHT_PI_THIRDS),
        ("z", "z", EIGHT_PI_THIRDS),
        ("x", "y", 0.0),
        ("x", "z", 0.0),
        ("y", "z", 0.0),
        (2, 0, 0.0),
    ],
    ids=["xx", "yy", "zz", "xy", "xz", "yz", "integer_axes"],
)
def test_angular_polarization_integral(i, j, expected):
    """The polarization-summed angular moment is 8 pi / 3 delta_ij on a 32 x 32 grid."""
    value = angular_polarization_integral(i, j, 32, 32)
    assert value == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize(
    "i, n_theta, n_phi",
    [("w", 8, 8), ("x", 1, 8), ("x", 8, 1), (True, 8, 8)],
    ids=["bad_axis", "one_theta", "one_phi", "bool_axis"],
)
def test_angular_polarization_integral_domain(i, n_theta, n_phi):
    with pytest.raises(DomainError):
        angular_polarization_integral(i, "x", n_theta, n_phi)


def test_angular_nodes_layouts():
    """One node is the weighted body diagonal; larger counts cover the sphere."""
    dirs, weights = angular_nodes(1)
    assert np.allclose(dirs, 1.0 / math.sqrt(3.0))
    assert weights.tolist() == [pytest.approx(4.0 * math.pi)]

    dirs, weights = angular_nodes(3)
    assert dirs.shape == (18, 3)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    assert weights.sum() == pytest.approx(4.0 * math.pi, rel=1e-14)

    with pytest.raises(DomainError):
        angular_nodes(0)


# ---------------------------------------------
# Frequency quadrature
# ---------------------------------------------

@pytest.mark.parametrize("panel_order", [1, 2, 4], ids=["midpoint", "order2", "order4"])
def test_frequency_quadrature_weights(panel_order):
    """Weights sum to the window width; nodes are sorted and inside the window."""
    nodes, weights = frequency_quadrature(24, 0.2, 5.0, 1.0, panel_order)
    assert len(nodes) == 24
    assert weights.sum() == pytest.approx(4.8, rel=1e-13)
    assert np.all(np.diff(nodes) > 0)
    assert nodes[0] > 0.2 and nodes[-1] < 5.0


def test_frequency_quadrature_integrates_cubic():
    """Order-4 panels integrate omega^3 exactly."""
    nodes, weights = frequency_quadrature(40, 0.2, 5.0, 1.0, 4)
    assert np.dot(weights, nodes ** 3) == pytest.approx((5.0 ** 4 - 0.2 ** 4) / 4.0, rel=1e-13)


def test_frequency_quadrature_refines_resonance():
    """The resonant band carries four times the panel density."""
    nodes, _ = frequency_quadrature(80, 0.2, 5.0, 1.0, 4)
    spacing_in = np.mean(np.diff(nodes[(nodes > 0.85) & (nodes < 1.15)]))
    spacing_out = np.mean(np.diff(nodes[(nodes > 3.0) & (nodes < 4.5)]))
    assert spacing_out / spacing_in == pytest.approx(4.0, rel=0.2)


def test_resonant_ladder_is_even(weak_spin):
    """panel_order = 1 inside the resonant window gives spacing 2 beta."""
    lo, hi = resonant_window(weak_spin, 6)
    assert (hi - lo) == pytest.approx(12.0 * weak_spin.beta, rel=1e-12)
    nodes, weights = frequency_quadrature(6, lo, hi, weak_spin.omega, 1)
    assert np.allclose(np.diff(nodes), 2.0 * weak_spin.beta, rtol=1e-9)
    assert np.allclose(weights, 2.0 * weak_spin.beta, rtol=1e-9)


def test_resonant_window_domain():
    with pytest.raises(DomainError):
        resonant_window(SpinSystem.direct(0.0, 1.0), 6)
    with pytest.raises(DomainError):
        resonant_window(SpinSystem.direct(10.0, 1.0), 600)


def test_frequency_quadrature_domain():
    with pytest.raises(DomainError):
        frequency_quadrature(4, 0.2, 5.0, 1.0, 0)


# ---------------------------------------------
# Mode sets
# ---------------------------------------------

def test_build_mode_set_layout(unit_spin):
    """n_freq x directions x two polarizations, couplings transverse to k_hat."""
    modes = build_mode_set(8, 3, 0.5, 2.0, unit_spin)
    assert len(modes) == 8 * 18 * 2
    assert set(np.unique(modes.lam)) == {1, 2}
    assert np.allclose(np.einsum("ij,ij->i", modes.coupling, modes.k_hat), 0.0, atol=1e-14)
    assert modes.window == (0.5, 2.0)
    assert modes.alpha == unit_spin.alpha
    assert len(modes.modes) == len(modes)
    assert "n_modes=288" in repr(modes)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(omega_min=2.0, omega_max=1.0),
        dict(omega_min=0.0, omega_max=1.0),
        dict(measure="bogus"),
        dict(n_freq=0),
    ],
    ids=["inverted_window", "zero_lower", "unknown_measure", "no_frequencies"],
)
def test_build_mode_set_domain(unit_spin, kwargs):
    params = dict(n_freq=4, n_angular=1, omega_min=0.5, omega_max=2.0)
    params.update(kwargs)
    with pytest.raises(DomainError):
        build_mode_set(spin=unit_spin, **params)


def test_build_mode_set_requires_natural_units():
    with pytest.raises(DomainError):
        build_mode_set(4, 1, 0.5, 2.0, SpinSystem.direct(1.0, 1.0, UnitMode.SI))


def test_golden_rule_converges_to_beta(unit_spin):
    """A refined broadband set reproduces beta within 5%."""
    modes = build_mode_set(200, 16, 0.2, 5.0, unit_spin)
    rate = golden_rule_rate(modes, unit_spin.omega)
    assert rate == pytest.approx(unit_spin.beta, rel=0.05)


def test_golden_rule_on_resonant_ladder(weak_spin):
    """The oracle ladder with the body-diagonal direction is rate matched."""
    lo, hi = resonant_window(weak_spin, 6)
    modes = build_mode_set(6, 1, lo, hi, weak_spin, panel_order=1)
    assert len(modes) == 12
    assert local_spacing(modes, weak_spin.omega) == pytest.approx(2.0 * weak_spin.beta, rel=1e-9)
    assert golden_rule_rate(modes, weak_spin.omega) == pytest.approx(weak_spin.beta, rel=0.02)


def test_literal_measure_is_pi_times_larger(unit_spin):
    matched = build_mode_set(40, 2, 0.5, 2.0, unit_spin)
    literal = build_mode_set(40, 2, 0.5, 2.0, unit_spin, measure="literal")
    ratio = golden_rule_rate(literal, 1.0) / golden_rule_rate(matched, 1.0)
    assert ratio == pytest.approx(math.pi, rel=1e-12)


def test_golden_rule_outside_window(unit_spin):
    modes = build_mode_set(8, 1, 0.5, 2.0, unit_spin)
    with pytest.raises(DomainError):
        golden_rule_rate(modes, 3.0)
    with pytest.raises(DomainError):
        golden_rule_rate(modes, 1.0, bandwidth=-1.0)


@pytest.mark.parametrize(
    "measure, expected",
    [("literal", 1.0), ("rate_matched", 1.0 / math.pi)],
    ids=["literal", "rate_matched"],
)
def test_shell_sum_rule(unit_spin, measure, expected):
    """Resolved sphere: the shell moment is the continuum value, a factor 1 / pi lower when rate matched."""
    modes = build_mode_set(8, 4, 0.5, 1.5, unit_spin, measure=measure)
    assert np.allclose(shell_moment(modes, 0.5, 1.5), expected * np.eye(3), rtol=0, atol=1e-10 * expected)
    assert np.allclose(shell_moment(modes, 0.5, 1.0), expected * np.eye(3), rtol=0, atol=1e-10 * expected)


def test_shell_moment_body_diagonal(unit_spin):
    """The single diagonal direction gets the diagonal moments right."""
    modes = build_mode_set(8, 1, 0.5, 1.5, unit_spin, measure="literal")
    assert np.allclose(np.diag(shell_moment(modes, 0.5, 1.5)), 1.0, rtol=1e-12)
    with pytest.raises(DomainError):
        shell_moment(modes, 3.0, 4.0)


def test_shell_moment_detects_wrong_couplings(unit_spin):
    modes = build_mode_set(8, 4, 0.5, 1.5, unit_spin, measure="literal")
    assert np.allclose(shell_moment(modes.scaled(2.0), 0.5, 1.5), 4.0 * np.eye(3), rtol=1e-12, atol=1e-12)


def test_shell_moment_needs_quadrature_weights(unit_spin, tmp_path):
    modes = build_mode_set(4, 1, 0.5, 2.0, unit_spin)
    loaded = ModeSet.from_csv(modes.to_csv(tmp_path / "modes.csv"), alpha=unit_spin.alpha)
    with pytest.raises(DomainError):
        shell_moment(loaded, 0.5, 2.0)


def test_single_mode_pair(unit_spin):
    """One frequency, one direction: a resonant pair carrying the one-point shell weight."""
    modes = build_mode_set(1, 1, 0.9, 1.1, unit_spin)
    assert len(modes) == 2
    assert sorted(modes.lam.tolist()) == [1, 2]
    assert np.allclose(modes.omega_k, 1.0, rtol=1e-15)
    shell_weight = 1.0 ** 3 * 0.2 * 4.0 * math.pi / (math.pi * 2.0 * (2.0 * math.pi) ** 3)
    assert np.allclose(np.sum(modes.coupling ** 2, axis=1), shell_weight, rtol=1e-12)
    assert np.allclose(np.diag(shell_moment(modes, 0.9, 1.1)), 1.0 / math.pi, rtol=1e-12)


def test_golden_rule_zero_couplings(unit_spin):
    modes = build_mode_set(40, 2, 0.5, 2.0, unit_spin).scaled(0.0)
    assert golden_rule_rate(modes, 1.0) == 0.0


def test_golden_rule_bandwidth_robust(unit_spin):
    """Halving the smoothing width on a refined set moves the rate by less than 2%."""
    modes = build_mode_set(200, 16, 0.2, 5.0, unit_spin)
    wide = golden_rule_rate(modes, unit_spin.omega, bandwidth=0.06)
    narrow = golden_rule_rate(modes, unit_spin.omega, bandwidth=0.03)
    assert abs(wide - narrow) / narrow < 0.02
    assert narrow == pytest.approx(unit_spin.beta, rel=0.05)


def _rotate_polarizations(modes: ModeSet, angle: float) -> ModeSet:
    """Same set with every (e1, e2) pair rotated by ``angle`` about its k_hat."""
    first, second = modes.lam == 1, modes.lam == 2
    c1, c2 = modes.coupling[first], modes.coupling[second]
    coupling = modes.coupling.copy()
    coupling[first] = math.cos(angle) * c1 + math.sin(angle) * c2
    coupling[second] = -math.sin(angle) * c1 + math.cos(angle) * c2
    return replace(modes, coupling=coupling)


@pytest.mark.parametrize("angle", [0.3, math.pi / 4.0, 2.0], ids=["small", "quarter", "large"])
def test_observables_ignore_polarization_convention(unit_spin, angle):
    modes = build_mode_set(24, 3, 0.5, 2.0, unit_spin)
    rotated = _rotate_polarizations(modes, angle)
    assert not np.allclose(rotated.coupling, modes.coupling)
    assert golden_rule_rate(rotated, 1.0) == pytest.approx(golden_rule_rate(modes, 1.0), rel=1e-12)
    assert np.allclose(shell_moment(rotated, 0.5, 2.0), shell_moment(modes, 0.5, 2.0), rtol=0, atol=1e-12)


def test_mode_set_scaled_and_csv(unit_spin, tmp_path):
    modes = build_mode_set(4, 1, 0.5, 2.0, unit_spin)
    half = modes.scaled(0.5)
    assert np.allclose(half.flip_strength(), 0.25 * modes.flip_strength(), rtol=1e-15)

    path = modes.to_csv(tmp_path / "modes.csv")
    assert path.read_text().splitlines()[0] == ",".join(MODE_CSV_COLUMNS)
    again = ModeSet.from_csv(path, alpha=unit_spin.alpha)
    assert np.array_equal(again.coupling, modes.coupling)
    assert np.array_equal(again.omega_k, modes.omega_k)
    assert np.array_equal(again.lam, modes.lam)
