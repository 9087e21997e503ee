# spinvac/operations/radiation.py

"""
Radiation-reaction field of a spin history.

Local form:     B_RR(t) = -(alpha / 3 pi^2) S'''(t)
Spectral form:  -(alpha / 3 pi^2) int_0^W dw w^3 e^{-eps w} int_0^t dt' S(t') sin w (t - t')

With tau = t - t' the frequency integral has the closed form

    K(tau) = Im[6/z^4 - e^{-zW} (W^3/z + 3W^2/z^2 + 6W/z^3 + 6/z^4)],  z = eps - i tau

and, for W -> infinity, K = L''' with L(tau) = eps / (eps^2 + tau^2). Acting on
an admissible history (S and three derivatives zero at t' = 0) the regulated
integral equals 2 S / eps^3 - S'' / eps + (pi / 2) S''' + O(eps). The two
divergent local terms are removed analytically and the finite part is divided
by the half-line weight pi / 2.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec
from scipy.interpolate import CubicSpline

from spinvac.core.errors import AdmissibilityError, DomainError
from spinvac.schemas.results import ConvergenceLadder

logger = logging.getLogger(__name__)

STENCIL = np.array([1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0])
STENCIL_OFFSETS = np.arange(-3, 4)
STENCIL_MARGIN = 7
OMEGA_MAX_FACTOR = 50.0
ADMISSIBILITY_TOLERANCE = 1e-9

Evaluator = Callable[[float, int], np.ndarray]


def field_prefactor(alpha: float) -> float:
    return -alpha / (3.0 * math.pi ** 2)


@dataclass(frozen=True)
class SpinHistory:
    """
    A spin vector S(t') sampled on a strictly increasing grid.

    ``evaluate(t, order)`` returns the order-th time derivative as a 3-vector
    when the history is analytic; sampled histories use a cubic spline.
    """
    t_grid: np.ndarray
    samples: np.ndarray
    evaluate: Optional[Evaluator] = None
    name: str = "sampled"

    def __post_init__(self):
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise DomainError("t_grid must be strictly increasing with at least two points")
        if np.shape(self.samples) != (grid.size, 3):
            raise DomainError(f"samples must have shape ({grid.size}, 3), got {np.shape(self.samples)}")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("samples must be finite")

    @classmethod
    def from_function(cls, evaluate: Evaluator, t_grid, name: str = "analytic") -> "SpinHistory":
        grid = np.asarray(t_grid, dtype=float)
        samples = np.array([evaluate(t, 0) for t in grid])
        return cls(t_grid=grid, samples=samples, evaluate=evaluate, name=name)

    def derivative(self, t: float, order: int) -> np.ndarray:
        if self.evaluate is not None:
            return np.asarray(self.evaluate(t, order), dtype=float)
        return np.asarray(self.spline(t, order), dtype=float)

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.t_grid, self.samples, axis=0)

    def value(self, t: float) -> np.ndarray:
        return self.derivative(t, 0)

    def has_analytic_form(self) -> bool:
        return self.evaluate is not None


def combine(a: float, x: SpinHistory, b: float, y: SpinHistory) -> SpinHistory:
    """The history a X + b Y on the grid of X."""
    if x.evaluate is not None and y.evaluate is not None:
        return SpinHistory.from_function(
            lambda t, k: a * x.evaluate(t, k) + b * y.evaluate(t, k), x.t_grid, name="combination"
        )
    samples = a * x.samples + b * np.array([y.value(t) for t in x.t_grid])
    return SpinHistory(t_grid=x.t_grid, samples=samples, name="combination")


def constant_history(vector: Sequence[float], t_grid) -> SpinHistory:
    v = np.asarray(vector, dtype=float)

    def evaluate(t, order):
        return v.copy() if order == 0 else np.zeros(3)

    return SpinHistory.from_function(evaluate, t_grid, name="constant")


def cubic_history(t_grid) -> SpinHistory:
    """S(t') = (t'^3, 0, 0)."""
    def evaluate(t, order):
        x = [t ** 3, 3.0 * t ** 2, 6.0 * t, 6.0][order] if order <= 3 else 0.0
        return np.array([x, 0.0, 0.0])

    return SpinHistory.from_function(evaluate, t_grid, name="cubic")


def precessing_history(omega: float, t_grid) -> SpinHistory:
    """S(t') = (cos w t', sin w t', 0)."""
    def evaluate(t, order):
        phase = omega * t + 0.5 * math.pi * order
        return omega ** order * np.array([math.cos(phase), math.sin(phase), 0.0])

    return SpinHistory.from_function(evaluate, t_grid, name="precessing")


def ramp_history(t_grid, tau: float = 0.5, direction: Sequence[float] = (1.0, 0.0, 0.0)) -> SpinHistory:
    """
    Admissible history whose third derivative switches on as 6 (1 - e^{-t'/tau}).

    S, S', S'' and S''' all vanish at t' = 0.
    """
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    d = np.asarray(direction, dtype=float)

    def evaluate(t, order):
        decay = -math.expm1(-t / tau)
        if order == 0:
            q = t ** 3 / 6.0 - tau * t ** 2 / 2.0 + tau ** 2 * t - tau ** 3 * decay
        elif order == 1:
            q = t ** 2 / 2.0 - tau * t + tau ** 2 * decay
        elif order == 2:
            q = t - tau * decay
        elif order == 3:
            q = decay
        else:
            q = (-1.0) ** (order - 4) * math.exp(-t / tau) / tau ** (order - 3)
        return 6.0 * q * d

    return SpinHistory.from_function(evaluate, t_grid, name="ramp")


def stencil_third_derivative(func: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    """Centered seven-point third derivative, error O(h^4)."""
    values = np.array([func(t + k * h) for k in STENCIL_OFFSETS])
    return np.tensordot(STENCIL, values, axes=1) / h ** 3


def _check_interior(history: SpinHistory, t: float) -> int:
    grid = history.t_grid
    before = int(np.searchsorted(grid, t, side="left"))
    after = int(grid.size - np.searchsorted(grid, t, side="right"))
    if before < STENCIL_MARGIN or after < STENCIL_MARGIN:
        raise DomainError(
            f"t = {t} needs {STENCIL_MARGIN} grid points on each side, has {before} before and {after} after"
        )
    return before


def rr_field_local(history: SpinHistory, t: float, alpha: float = 1.0) -> np.ndarray:
    """
    -(alpha / 3 pi^2) S'''(t), analytic when available, else a seven-point stencil.

    Raises:
    - DomainError: if t has fewer than seven grid points on either side.
    """
    index = _check_interior(history, t)
    if history.has_analytic_form():
        third = history.derivative(t, 3)
    else:
        h = float(history.t_grid[index] - history.t_grid[index - 1])
        third = stencil_third_derivative(history.spline, t, h)
    return field_prefactor(alpha) * third


def check_admissibility(history: SpinHistory) -> None:
    """
    Require S, S', S'' and S''' to vanish at t' = 0.

    Raises:
    - AdmissibilityError: naming the first derivative that does not vanish.
    """
    start = float(history.t_grid[0])
    scale = max(1.0, float(np.max(np.abs(history.samples))))
    for order, check in enumerate(("S(0)", "S'(0)", "S''(0)", "S'''(0)")):
        value = history.derivative(start, order)
        if np.max(np.abs(value)) > ADMISSIBILITY_TOLERANCE * scale:
            raise AdmissibilityError(
                f"History '{history.name}' is not admissible: {check} = {value.tolist()}", check=check
            )


def regulated_kernel(tau, epsilon: float, omega_max: float):
    """int_0^W w^3 e^{-eps w} sin(w tau) dw in closed form."""
    z = epsilon - 1j * np.asarray(tau, dtype=float)
    w = omega_max
    tail = np.exp(-z * w) * (w ** 3 / z + 3.0 * w ** 2 / z ** 2 + 6.0 * w / z ** 3 + 6.0 / z ** 4)
    return np.imag(6.0 / z ** 4 - tail)


def _lorentzian_derivatives(tau: float, epsilon: float):
    d = epsilon ** 2 + tau ** 2
    value = epsilon / d
    first = -2.0 * epsilon * tau / d ** 2
    second = epsilon * (6.0 * tau ** 2 - 2.0 * epsilon ** 2) / d ** 3
    return value, first, second


def rr_finite_part(history: SpinHistory, t: float, epsilon: float,
                   omega_max: Optional[float] = None) -> np.ndarray:
    """Regulated integral at t with the divergent 2 S / eps^3 - S'' / eps removed."""
    w = OMEGA_MAX_FACTOR / epsilon if omega_max is None else omega_max
    start = float(history.t_grid[0])
    span = t - start
    s0, s1, s2 = (history.derivative(t, k) for k in range(3))

    def integrand(tau):
        remainder = history.value(t - tau) - s0 + tau * s1 - 0.5 * tau ** 2 * s2
        return remainder * regulated_kernel(tau, epsilon, w)

    points = [p for p in (epsilon, 3.0 * epsilon, 10.0 * epsilon) if p < span]
    remainder_part, _ = quad_vec(integrand, 0.0, span, epsabs=1e-13, epsrel=1e-10,
                                 points=points or None, limit=2000)
    lv, l1, l2 = _lorentzian_derivatives(span, epsilon)
    boundary = s0 * l2 - s1 * (span * l2 - l1) + 0.5 * s2 * (span ** 2 * l2 - 2.0 * span * l1 + 2.0 * lv)
    return remainder_part + boundary


def rr_field_spectral(history: SpinHistory, t: float, epsilon: float, alpha: float = 1.0,
                      omega_max: Optional[float] = None) -> np.ndarray:
    """
    Regulated spectral radiation-reaction field; tends to rr_field_local as eps -> 0.

    Raises:
    - DomainError: for a non-positive epsilon, omega_max below 50 / eps, or t off the grid.
    - AdmissibilityError: for a history that does not start at rest.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if omega_max is not None and omega_max < OMEGA_MAX_FACTOR / epsilon * (1 - 1e-12):
        raise DomainError(f"omega_max must be at least {OMEGA_MAX_FACTOR} / epsilon, got {omega_max}")
    if not history.t_grid[0] < t <= history.t_grid[-1]:
        raise DomainError(f"t = {t} is outside the history ({history.t_grid[0]}, {history.t_grid[-1]}]")
    check_admissibility(history)
    finite = rr_finite_part(history, t, epsilon, omega_max)
    return field_prefactor(alpha) * (2.0 / math.pi) * finite


def rr_convergence(history: SpinHistory, t: float, epsilons: Sequence[float],
                   alpha: float = 1.0) -> ConvergenceLadder:
    """Residuals of the spectral field along an epsilon ladder and the fitted order."""
    eps = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    if eps.size < 2:
        raise DomainError("The epsilon ladder needs at least two values")
    local = rr_field_local(history, t, alpha)
    local_norm = float(np.linalg.norm(local))
    if local_norm == 0:
        raise DomainError("The local field vanishes; relative residuals are undefined")
    spectral = [rr_field_spectral(history, t, e, alpha) for e in eps]
    residuals = np.array([np.linalg.norm(s - local) / local_norm for s in spectral])
    order = float(np.polyfit(np.log(eps), np.log(residuals), 1)[0])
    logger.info(f"Radiation-reaction ladder at t={t}: residuals {residuals.tolist()}, order {order:.3f}")
    return ConvergenceLadder(
        t=t,
        epsilons=eps.tolist(),
        local=local.tolist(),
        spectral=[s.tolist() for s in spectral],
        residuals=residuals.tolist(),
        order=order,
        monotone=bool(np.all(np.diff(residuals) < 0)),
    )
