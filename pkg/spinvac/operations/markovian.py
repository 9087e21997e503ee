# spinvac/operations/markovian.py

"""
Closed-form Markovian spin dynamics.

    d<S_z>/dt = -beta <S_z> - beta hbar / 2
    <S_z(t)>  = A exp(-beta t) - hbar / 2,           A = sz0 + hbar / 2
    <S_+(t)>  = B exp((-beta / 2 + i Omega) t),      B = splus0
    Omega     = omega + delta1 - delta2
"""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from spinvac.core.errors import DomainError, EvolutionError
from spinvac.models.spin import SpinSystem
from spinvac.models.trajectory import Trajectory
from spinvac.schemas.results import MarkovianSolution, ShiftResult

logger = logging.getLogger(__name__)


def _check_grid(t_grid) -> np.ndarray:
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("t_grid must be a non-empty 1-D array")
    if times[0] < 0:
        raise DomainError(f"t_grid must be non-negative, starts at {times[0]}")
    if np.any(np.diff(times) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    return times


def _check_sz0(spin: SpinSystem, sz0: float) -> None:
    if abs(sz0) > spin.hbar_half * (1.0 + 1e-12):
        raise DomainError(f"|sz0| must not exceed hbar/2 = {spin.hbar_half}, got {sz0}")


def markovian_solution(spin: SpinSystem, sz0: float, splus0: complex = 0j,
                       shifts: Optional[ShiftResult] = None) -> MarkovianSolution:
    """Fix A, B and Omega from the initial condition and optional shifts."""
    _check_sz0(spin, sz0)
    delta1 = shifts.delta1 if shifts is not None else 0.0
    delta2 = shifts.delta2 if shifts is not None else 0.0
    splus0 = complex(splus0)
    return MarkovianSolution(
        beta=spin.beta,
        omega=spin.omega,
        delta1=delta1,
        delta2=delta2,
        omega_shifted=spin.omega + delta1 - delta2,
        A=sz0 + spin.hbar_half,
        B_re=splus0.real,
        B_im=splus0.imag,
        hbar=spin.hbar,
        cutoff=shifts.cutoff if shifts is not None else None,
    )


def sz_rhs(spin: SpinSystem):
    """Right-hand side f(t, sz) of the S_z relaxation equation."""
    beta = spin.beta
    hbar_half = spin.hbar_half

    def rhs(t, sz):
        return -beta * sz - beta * hbar_half

    return rhs


def solve_sz(spin: SpinSystem, sz0: float, t_grid) -> Trajectory:
    """
    Closed-form <S_z(t)>; the transverse part is left at zero.

    Raises:
    - DomainError: if |sz0| > hbar/2 or the grid is invalid.
    """
    _check_sz0(spin, sz0)
    times = _check_grid(t_grid)
    amplitude = sz0 + spin.hbar_half
    sz = amplitude * np.exp(-spin.beta * times) - spin.hbar_half
    return Trajectory(
        times=times,
        sz=sz,
        splus=np.zeros_like(times, dtype=complex),
        hbar_half=spin.hbar_half,
        metadata={"engine": "analytic"},
    )


def solve_splus(spin: SpinSystem, splus0: complex, shifts: Optional[ShiftResult],
                t_grid) -> Trajectory:
    """
    <S_+(t)> = B exp((-beta/2 + i Omega) t) on the grid; S_z is left at zero.

    Without shifts Omega is the bare Larmor frequency.
    """
    times = _check_grid(t_grid)
    omega_shifted = spin.omega
    if shifts is not None:
        omega_shifted = spin.omega + shifts.delta1 - shifts.delta2
    return Trajectory(
        times=times,
        sz=np.zeros_like(times),
        splus=complex(splus0) * np.exp((-0.5 * spin.beta + 1j * omega_shifted) * times),
        hbar_half=spin.hbar_half,
        metadata={"engine": "analytic"},
    )


def solve_trajectory(spin: SpinSystem, sz0: float, splus0: complex, t_grid,
                     shifts: Optional[ShiftResult] = None) -> Trajectory:
    """Combined S_z and S_+ trajectory of the Markovian model."""
    sz_part = solve_sz(spin, sz0, t_grid)
    splus = solve_splus(spin, splus0, shifts, sz_part.times).splus
    return Trajectory(
        times=sz_part.times,
        sz=sz_part.sz,
        splus=splus,
        hbar_half=spin.hbar_half,
        metadata={"engine": "analytic"},
    )


def integrate_sz(spin: SpinSystem, sz0: float, t_grid, rtol: float = 1e-12,
                 atol: float = 1e-14) -> np.ndarray:
    """Adaptive DOP853 integration of the S_z equation, sampled on t_grid."""
    _check_sz0(spin, sz0)
    times = _check_grid(t_grid)
    if times[-1] == times[0]:
        return np.array([sz0])
    result = solve_ivp(
        sz_rhs(spin),
        (0.0, float(times[-1])),
        [sz0],
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not result.success:
        raise EvolutionError(f"S_z integration failed: {result.message}")
    return result.y[0]
