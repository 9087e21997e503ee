# spinvac/operations/geometry.py

"""
Module: geometry.py

Photon-mode geometry: transverse polarization bases, the angular
polarization-sum integrals, discretized mode sets with coupling vectors, and
the golden-rule rate computed from such a set.

Conventions:
- e1 = normalize(z x k_hat), falling back to x when k_hat is along z;
  e2 = k_hat x e1. Observables do not depend on this choice.
- Angular quadrature is Gauss-Legendre in cos(theta) times a uniform rule in
  phi, exact for the quadratic polynomials the polarization sums produce.
- Frequencies use composite Gauss-Legendre panels, four times denser within
  |omega_k - omega| < 0.2 omega.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy.special import ndtr, roots_legendre

from spinvac.core.errors import DomainError
from spinvac.core.units import UnitMode, decay_rate
from spinvac.models.modes import ModeSet, PolarizationBasis
from spinvac.models.spin import SpinSystem

logger = logging.getLogger(__name__)

Axis = Union[str, int]

AXES = {"x": 0, "y": 1, "z": 2}
PARALLEL_TOLERANCE = 1e-10
RESONANT_BAND = 0.2
RESONANT_REFINEMENT = 4.0
MEASURES = ("rate_matched", "literal")


def _axis_index(axis: Axis) -> int:
    if isinstance(axis, str) and axis.lower() in AXES:
        return AXES[axis.lower()]
    if isinstance(axis, (int, np.integer)) and not isinstance(axis, bool) and 0 <= axis <= 2:
        return int(axis)
    raise DomainError(f"Axis must be one of x, y, z (or 0, 1, 2), got {axis!r}")


def _transverse_frames(k_hats: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized e1, e2 for an (N, 3) array of unit vectors."""
    z = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(z, k_hats)
    norms = np.linalg.norm(e1, axis=1)
    parallel = norms < PARALLEL_TOLERANCE
    e1[parallel] = np.array([1.0, 0.0, 0.0])
    norms[parallel] = 1.0
    e1 = e1 / norms[:, None]
    e2 = np.cross(k_hats, e1)
    return e1, e2


def polarization_basis(k_hat) -> PolarizationBasis:
    """
    Deterministic right-handed transverse basis for a unit propagation vector.

    Raises:
    - DomainError: if k_hat is not a finite 3-vector of unit length (1e-12).
    """
    k = np.asarray(k_hat, dtype=float)
    if k.shape != (3,) or not np.all(np.isfinite(k)):
        raise DomainError(f"k_hat must be a finite 3-vector, got {k_hat!r}")
    norm = float(np.linalg.norm(k))
    if abs(norm - 1.0) > 1e-12:
        raise DomainError(f"k_hat must have unit length, got |k_hat| = {norm!r}")
    e1, e2 = _transverse_frames(k[None, :])
    return PolarizationBasis(k_hat=k.copy(), e1=e1[0], e2=e2[0])


def _sphere_grid(n_theta: int, n_phi: int) -> Tuple[np.ndarray, np.ndarray]:
    """Directions and weights of the Gauss-Legendre x uniform-phi product rule."""
    cos_theta, w_theta = roots_legendre(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = np.full(n_phi, 2.0 * math.pi / n_phi)
    ct, ph = np.meshgrid(cos_theta, phi, indexing="ij")
    st = np.sqrt(1.0 - ct ** 2)
    dirs = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
    weights = np.outer(w_theta, w_phi).reshape(-1)
    return dirs, weights


def angular_nodes(n_angular: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Angular layout used by build_mode_set.

    One node means the body diagonal (1, 1, 1)/sqrt(3) with the full 4 pi
    weight: it reproduces every diagonal second moment of the sphere and hence
    the polarization-summed spin-flip coupling. Larger counts use the product
    rule with n_angular nodes in cos(theta) and 2 n_angular in phi.
    """
    if n_angular < 1:
        raise DomainError(f"n_angular must be >= 1, got {n_angular}")
    if n_angular == 1:
        return np.full((1, 3), 1.0 / math.sqrt(3.0)), np.array([4.0 * math.pi])
    return _sphere_grid(n_angular, 2 * n_angular)


def angular_polarization_integral(i: Axis, j: Axis, n_theta: int, n_phi: int) -> float:
    """
    Quadrature of  int dOmega sum_lambda (k_hat x e)_i (k_hat x e)_j.

    The exact value is 8 pi / 3 on the diagonal and 0 off it.

    Raises:
    - DomainError: for an invalid axis or fewer than two nodes per angle.
    """
    a, b = _axis_index(i), _axis_index(j)
    if n_theta < 2 or n_phi < 2:
        raise DomainError(f"n_theta and n_phi must be >= 2, got {n_theta}, {n_phi}")
    dirs, weights = _sphere_grid(n_theta, n_phi)
    e1, e2 = _transverse_frames(dirs)
    total = np.zeros(len(dirs))
    for e in (e1, e2):
        t = np.cross(dirs, e)
        total += t[:, a] * t[:, b]
    return float(np.dot(weights, total))


def frequency_quadrature(n_freq: int, omega_min: float, omega_max: float,
                         omega_res: float, panel_order: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre nodes and weights on [omega_min, omega_max].

    Panel edges are equidistributed in a density that is RESONANT_REFINEMENT
    times higher within the resonant band around omega_res. With
    panel_order = 1 every panel is a midpoint rule, giving an evenly spaced
    ladder when the whole window sits inside one density region.
    """
    if panel_order < 1:
        raise DomainError(f"panel_order must be >= 1, got {panel_order}")
    n_panels = max(1, n_freq // panel_order)
    orders = np.full(n_panels, n_freq // n_panels)
    orders[: n_freq % n_panels] += 1

    breaks = [omega_min, omega_max]
    if omega_res > 0:
        for edge in (omega_res * (1 - RESONANT_BAND), omega_res * (1 + RESONANT_BAND)):
            if omega_min < edge < omega_max:
                breaks.append(edge)
    breaks = np.array(sorted(breaks))
    mids = 0.5 * (breaks[1:] + breaks[:-1])
    density = np.where(np.abs(mids - omega_res) < RESONANT_BAND * omega_res, RESONANT_REFINEMENT, 1.0)
    cumulative = np.concatenate([[0.0], np.cumsum(density * np.diff(breaks))])
    edges = np.interp(np.linspace(0.0, cumulative[-1], n_panels + 1), cumulative, breaks)

    nodes, weights = [], []
    for (a, b), q in zip(zip(edges[:-1], edges[1:]), orders):
        x, w = roots_legendre(int(q))
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def build_mode_set(n_freq: int, n_angular: int, omega_min: float, omega_max: float,
                   spin: SpinSystem, panel_order: int = 4,
                   measure: str = "rate_matched") -> ModeSet:
    """
    Discretize the free-space vacuum field at the origin into a ModeSet.

    Mode j carries the k-space volume dV = omega^2 W_freq W_angle (c = 1) and
    the coupling vector g = sqrt(dV / (2 (2 pi)^3 omega)) omega (k_hat x e).
    The "rate_matched" measure divides dV by pi so that the golden-rule rate
    of a refined set converges to decay_rate(alpha, omega); "literal" keeps
    the bare continuum measure, whose golden-rule limit is pi times larger.

    Raises:
    - DomainError: for an empty or non-positive window, non-positive counts,
      an unknown measure, or a spin system not in natural units.
    """
    if n_freq < 1 or n_angular < 1:
        raise DomainError(f"n_freq and n_angular must be >= 1, got {n_freq}, {n_angular}")
    if not (0 < omega_min < omega_max):
        raise DomainError(
            f"Frequency window must satisfy 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )
    if measure not in MEASURES:
        raise DomainError(f"measure must be one of {', '.join(MEASURES)}, got {measure!r}")
    if spin.units != UnitMode.NATURAL:
        raise DomainError("Mode sets are built in natural units")

    freqs, w_freq = frequency_quadrature(n_freq, omega_min, omega_max, spin.omega, panel_order)
    dirs, w_ang = angular_nodes(n_angular)
    e1, e2 = _transverse_frames(dirs)

    order = np.argsort(freqs)
    measure_factor = 1.0 / math.pi if measure == "rate_matched" else 1.0
    prefactor = (2.0 * math.pi) ** -3

    omega_k, k_hat, lam, coupling = [], [], [], []
    for w, wf in zip(freqs, w_freq):
        volume = w ** 2 * wf * w_ang * measure_factor
        amplitude = np.sqrt(volume * prefactor / (2.0 * w)) * w
        for index, e in ((1, e1), (2, e2)):
            omega_k.append(np.full(len(dirs), w))
            k_hat.append(dirs)
            lam.append(np.full(len(dirs), index))
            coupling.append(amplitude[:, None] * np.cross(dirs, e))

    modes = ModeSet(
        omega_k=np.concatenate(omega_k),
        k_hat=np.concatenate(k_hat),
        lam=np.concatenate(lam),
        coupling=np.concatenate(coupling),
        cutoff=float(omega_max),
        window=(float(omega_min), float(omega_max)),
        alpha=spin.alpha,
        measure=measure,
        frequency_nodes=freqs[order],
        frequency_weights=w_freq[order],
    )
    logger.info(f"Built {modes!r} from {n_freq} frequencies x {len(dirs)} directions")
    return modes


def resonant_window(spin: SpinSystem, n_levels: int, spacing_in_rates: float = 2.0) -> Tuple[float, float]:
    """
    Window omega +/- n_levels * delta / 2 with ladder spacing delta = spacing_in_rates * beta.

    With panel_order = 1 and n_levels frequencies this produces the evenly
    spaced quasi-continuum ladder the exact decay oracle runs on.
    """
    beta = decay_rate(spin.alpha, spin.omega)
    if beta <= 0:
        raise DomainError("A resonant window needs a non-zero decay rate")
    half = 0.5 * n_levels * spacing_in_rates * beta
    if half >= spin.omega:
        raise DomainError(f"Resonant window half-width {half} reaches zero frequency")
    return spin.omega - half, spin.omega + half


def local_spacing(modes: ModeSet, omega: float) -> float:
    """Distance between the frequency nodes that bracket omega."""
    nodes = modes.frequency_nodes if modes.frequency_nodes is not None else np.unique(modes.omega_k)
    if len(nodes) == 1:
        return modes.window[1] - modes.window[0]
    idx = int(np.clip(np.searchsorted(nodes, omega), 1, len(nodes) - 1))
    return float(nodes[idx] - nodes[idx - 1])


def golden_rule_rate(modes: ModeSet, omega: float, bandwidth: float = None) -> float:
    """
    2 pi times the smoothed spin-flip coupling density of ``modes`` at omega.

    The smoothing kernel is a Gaussian whose width defaults to twice the local
    frequency spacing, renormalized by its mass inside the mode window.

    Raises:
    - DomainError: if omega lies outside the mode window.
    """
    lo, hi = modes.window
    if not (lo <= omega <= hi):
        raise DomainError(f"omega = {omega} lies outside the mode window [{lo}, {hi}]")
    sigma = bandwidth if bandwidth is not None else 2.0 * local_spacing(modes, omega)
    if sigma <= 0:
        raise DomainError(f"bandwidth must be positive, got {sigma}")
    x = (modes.omega_k - omega) / sigma
    kernel = np.exp(-0.5 * x ** 2) / (math.sqrt(2.0 * math.pi) * sigma)
    mass = ndtr((hi - omega) / sigma) - ndtr((lo - omega) / sigma)
    density = float(np.dot(modes.flip_strength(), kernel)) / mass
    return 2.0 * math.pi * density


def shell_moment(modes: ModeSet, lo: float, hi: float) -> np.ndarray:
    """
    Discretized polarization sum rule over the frequency shell [lo, hi).

    Returns sum g_i g_j 2 omega_k over the shell's modes divided by the
    continuum value (8 pi / 3) (2 pi)^-3 int omega^4 d omega, with the
    integral taken by the set's own frequency quadrature. A resolved sphere
    gives the identity under the literal measure and identity / pi under
    rate_matched.

    Raises:
    - DomainError: if the shell holds no modes or the set carries no
      frequency quadrature weights.
    """
    if modes.frequency_nodes is None or modes.frequency_weights is None:
        raise DomainError("The shell sum rule needs the mode set's frequency quadrature weights")
    inside = (modes.omega_k >= lo) & (modes.omega_k < hi)
    if not np.any(inside):
        raise DomainError(f"No modes in shell [{lo}, {hi})")
    g = modes.coupling[inside]
    moment = (g * (2.0 * modes.omega_k[inside])[:, None]).T @ g
    nodes = (modes.frequency_nodes >= lo) & (modes.frequency_nodes < hi)
    integral = float(np.dot(modes.frequency_weights[nodes], modes.frequency_nodes[nodes] ** 4))
    continuum = (8.0 * math.pi / 3.0) * (2.0 * math.pi) ** -3 * integral
    return moment / continuum
