# spinvac/operations/kernel.py

"""
Finite-time memory kernels of the Markovian reduction and their large-time
replacements.

For detuning d the kernel is

    int_0^t dt' exp(i d (t' - t)) = -i (1 - cos d t) / d + sin(d t) / d

with d = omega_k - omega (minus branch), omega_k + omega (plus) or omega_k
(zero). As t grows it tends to -i/d + pi delta(d) on the minus branch and to
-i/d on the others; the delta term is only meaningful under an integral, so
the smearing helpers below give the replacement its numerical meaning.
"""

import logging
import math
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad, simpson

from spinvac.core.errors import DomainError
from spinvac.schemas.results import KernelAsymptote, KernelBranch

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SERIES_THRESHOLD = 1e-6


def detuning(omega_k: ArrayLike, omega: float, branch: KernelBranch) -> ArrayLike:
    branch = KernelBranch(branch)
    if branch == KernelBranch.MINUS:
        return omega_k - omega
    if branch == KernelBranch.PLUS:
        return omega_k + omega
    return omega_k


def kernel_integral_finite(omega_k: ArrayLike, omega: float, branch: KernelBranch,
                           t: float) -> Union[complex, np.ndarray]:
    """
    Exact finite-time kernel, vectorized over omega_k.

    Below |d t| < 1e-6 the removable singularity is evaluated by its Taylor
    series, which tends to t as d -> 0.

    Raises:
    - DomainError: if t is negative.

    Example:
    >>> z = kernel_integral_finite(2.0, 1.0, "minus", math.pi)
    >>> round(z.real, 12), round(z.imag, 12)
    (0.0, -2.0)
    """
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    d = np.asarray(detuning(np.asarray(omega_k, dtype=float), omega, branch), dtype=float)
    x = d * t
    small = np.abs(x) < SERIES_THRESHOLD
    safe_d = np.where(small, 1.0, d)
    x2 = x * x
    real = np.where(
        small,
        t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0),
        np.sin(x) / safe_d,
    )
    imag = np.where(
        small,
        -t * (x / 2.0 - x * x2 / 24.0 + x * x2 * x2 / 720.0),
        -(1.0 - np.cos(x)) / safe_d,
    )
    value = real + 1j * imag
    if value.ndim == 0:
        return complex(value)
    return value


def kernel_asymptotic(omega_k: float, omega: float, branch: KernelBranch) -> KernelAsymptote:
    """
    Large-time distributional pair: principal part -1/d and delta weight.

    The delta weight is pi on the minus branch and 0 on the others.

    Raises:
    - DomainError: when the principal part is requested at d = 0.
    """
    branch = KernelBranch(branch)
    d = float(detuning(omega_k, omega, branch))
    if d == 0.0:
        raise DomainError(f"Principal part is undefined at zero detuning on the {branch.value} branch")
    weight = math.pi if branch == KernelBranch.MINUS else 0.0
    return KernelAsymptote(principal_part=-1.0 / d, delta_weight=weight)


def smeared_finite_kernel(f: Callable[[np.ndarray], np.ndarray], omega: float,
                          branch: KernelBranch, t: float, lower: float, upper: float,
                          n_points: int = 40001) -> complex:
    """int_lower^upper f(omega_k) K_t(omega_k) d omega_k by Simpson on a uniform grid."""
    if not lower < upper:
        raise DomainError(f"Empty integration range [{lower}, {upper}]")
    grid = np.linspace(lower, upper, n_points)
    values = f(grid) * kernel_integral_finite(grid, omega, branch, t)
    return complex(simpson(values.real, x=grid), simpson(values.imag, x=grid))


def smeared_asymptotic_kernel(f: Callable[[float], float], omega: float,
                              branch: KernelBranch, lower: float, upper: float) -> complex:
    """
    The same integral against the large-time pair.

    The real part is delta_weight * f(omega) on the minus branch; the
    imaginary part is -P int f / d, taken with a Cauchy weight when the pole
    lies inside the range.
    """
    branch = KernelBranch(branch)
    if not lower < upper:
        raise DomainError(f"Empty integration range [{lower}, {upper}]")
    pole = {KernelBranch.MINUS: omega, KernelBranch.PLUS: -omega, KernelBranch.ZERO: 0.0}[branch]
    if lower < pole < upper:
        principal, _ = quad(f, lower, upper, weight="cauchy", wvar=pole, limit=200)
    else:
        principal, _ = quad(lambda x: f(x) / (x - pole), lower, upper, limit=200)
    real = 0.0
    if branch == KernelBranch.MINUS and lower < omega < upper:
        real = math.pi * float(f(omega))
    return complex(real, -principal)


def gaussian_test_function(center: float, width: float) -> Callable:
    """Narrow Gaussian bump used by the smearing checks."""
    def f(x):
        return np.exp(-0.5 * ((np.asarray(x) - center) / width) ** 2)
    return f
