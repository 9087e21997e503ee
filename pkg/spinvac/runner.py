# spinvac/runner.py

"""
Module: runner.py

Orchestration: a single run, parameter sweeps, and the published-estimate
report.

A run writes into its own directory:
- trajectory_analytic.csv / trajectory_exact.csv
- modes.csv (exact engine)
- plot.dat
- summary.json
- run.log (sidecar with timestamps and wall clock; not part of the manifest)

On failure every file the run created is removed again.
"""

import logging
import math
import shutil
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from spinvac.core.config import get_settings
from spinvac.core.errors import ConfigError, ConfigViolation, DomainError, FitError
from spinvac.core.units import QuantityKind, UnitMode, decay_rate_convention
from spinvac.io import read_summary, write_plot_data, write_summary
from spinvac.models.modes import ModeSet
from spinvac.models.spin import SpinSystem
from spinvac.models.trajectory import Trajectory
from spinvac.operations.exact import (
    FockTruncation,
    build_hamiltonian,
    evolve,
    fit_decay_rate,
    product_state,
)
from spinvac.operations.geometry import build_mode_set, golden_rule_rate, resonant_window
from spinvac.operations.markovian import solve_trajectory
from spinvac.operations.shift import compute_shifts
from spinvac.schemas.config import SWEEPABLE_KEYS, BathKind, SimulationConfig
from spinvac.schemas.results import ShiftResult
from spinvac.schemas.summary import LiteratureClaims, RunSummary

logger = logging.getLogger(__name__)

FIT_FRACTION = 0.8
SWEEP_COLUMNS = ["beta_analytic", "beta_fitted", "omega_shifted", "delta1", "delta2", "error"]


def build_spin(config: SimulationConfig) -> SpinSystem:
    """Spin system of a config, with coupling_scale applied to alpha."""
    if config.uses_particle:
        spin = SpinSystem.create(config.charge, config.mass, config.b_field, config.units)
    else:
        spin = SpinSystem.direct(config.alpha, config.omega, config.units)
    if config.coupling_scale != 1.0:
        spin = spin.with_coupling(spin.alpha * config.coupling_scale)
    return spin


def build_bath(config: SimulationConfig, spin: SpinSystem) -> ModeSet:
    if config.bath == BathKind.RESONANT:
        lo, hi = resonant_window(spin, config.n_freq)
        order = config.panel_order or 1
    else:
        lo, hi = config.window_min * spin.omega, config.window_max * spin.omega
        order = config.panel_order or 4
    return build_mode_set(config.n_freq, config.n_angular, lo, hi, spin,
                          panel_order=order, measure=config.measure)


def _analytic_grid(config: SimulationConfig, spin: SpinSystem) -> np.ndarray:
    if config.t_max is not None:
        return np.linspace(0.0, config.t_max, config.n_samples)
    if spin.beta <= 0:
        raise DomainError("t_max is required when the decay rate vanishes")
    return np.linspace(0.0, config.t_max_decay_times / spin.beta, config.n_samples)


def _recurrence_time(modes: ModeSet) -> Optional[float]:
    nodes = modes.frequency_nodes
    if nodes is None or len(nodes) < 2:
        return None
    return 2.0 * math.pi / float(np.min(np.diff(nodes)))


class _RunLog:
    """
    Attach a file handler that records only this thread's log records.

    Concurrent runs share the "spinvac" logger: the first one in saves its
    level and the last one out restores it.
    """

    _lock = threading.Lock()
    _active = 0
    _saved_level = logging.NOTSET

    def __init__(self, path: Path, level: str):
        self.path = path
        self.handler = logging.FileHandler(path, encoding="utf-8")
        self.handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
        self.handler.setLevel(level)
        thread = threading.get_ident()
        self.handler.addFilter(lambda record: record.thread == thread)
        self.logger = logging.getLogger("spinvac")

    def __enter__(self):
        with _RunLog._lock:
            if _RunLog._active == 0:
                _RunLog._saved_level = self.logger.level
            _RunLog._active += 1
            if self.logger.getEffectiveLevel() > self.handler.level:
                self.logger.setLevel(self.handler.level)
            self.logger.addHandler(self.handler)
        return self

    def __exit__(self, *exc):
        with _RunLog._lock:
            self.logger.removeHandler(self.handler)
            _RunLog._active -= 1
            if _RunLog._active == 0:
                self.logger.setLevel(_RunLog._saved_level)
        self.handler.close()
        return False


def _run_analytic(config: SimulationConfig, spin: SpinSystem,
                  shifts: Optional[ShiftResult]) -> Trajectory:
    sz0, splus0 = config.initial_bloch(spin.hbar)
    grid = _analytic_grid(config, spin)
    return solve_trajectory(spin, sz0, splus0, grid, shifts)


def _run_exact(config: SimulationConfig, spin: SpinSystem, directory: Path,
               created: List[Path]) -> Tuple[Trajectory, Dict[str, Optional[float]]]:
    modes = build_bath(config, spin)
    trunc = FockTruncation(n_modes=len(modes), n_max=config.n_max)
    cap = config.dimension_cap or get_settings().DIMENSION_CAP
    hamiltonian = build_hamiltonian(spin, modes, trunc, cap, config.rotating_wave)

    modes_path = directory / "modes.csv"
    modes.to_csv(modes_path)
    created.append(modes_path)

    recurrence = _recurrence_time(modes)
    if config.t_max is not None:
        t_end = config.t_max
    elif recurrence is not None:
        t_end = FIT_FRACTION * recurrence
    else:
        t_end = config.t_max_decay_times / spin.beta
    grid = np.linspace(0.0, t_end, config.n_samples)
    theta, phi = config.initial_angles()
    traj = evolve(hamiltonian, product_state(trunc, theta, phi), grid,
                  method=config.evolution_method.value, rtol=config.rtol,
                  norm_tolerance=config.norm_tolerance)

    fit_end = t_end if recurrence is None else min(t_end, FIT_FRACTION * recurrence)
    extras: Dict[str, Optional[float]] = {
        "recurrence_time": recurrence,
        "beta_golden_rule": golden_rule_rate(modes, spin.omega),
        "beta_fitted": None,
        "beta_fit_stderr": None,
    }
    try:
        fit = fit_decay_rate(traj, (0.0, fit_end))
        extras["beta_fitted"] = fit.beta
        extras["beta_fit_stderr"] = fit.beta_stderr
    except FitError as exc:
        logger.warning(f"No decay rate fitted: {exc}")
    return traj, extras


def run(config: SimulationConfig, directory: Optional[Union[str, Path]] = None) -> RunSummary:
    """
    Dispatch the configured engines and write the run artifacts.

    Raises:
    - SpinVacError subclasses from the engines; partial outputs are removed first.
    """
    settings = get_settings()
    config_hash = config.config_hash()
    if directory is None:
        root = Path(config.output_dir or settings.OUTPUT_DIR)
        directory = root / f"run-{config_hash[:12]}"
    directory = Path(directory)
    made_directory = not directory.exists()
    directory.mkdir(parents=True, exist_ok=True)
    created: List[Path] = []
    log_path = directory / "run.log"
    started = time.perf_counter()

    try:
        with _RunLog(log_path, settings.LOG_LEVEL):
            created.append(log_path)
            logger.info(f"Run {config_hash[:12]} starting in {directory}")
            summary = _execute(config, config_hash, directory, created)
            summary.wall_clock_s = time.perf_counter() - started
            logger.info(f"Run {config_hash[:12]} finished in {summary.wall_clock_s:.3f} s")
    except Exception as exc:
        logger.error(f"Run {config_hash[:12]} failed: {exc}")
        for path in created:
            path.unlink(missing_ok=True)
        if made_directory:
            shutil.rmtree(directory, ignore_errors=True)
        raise
    return summary


def _execute(config: SimulationConfig, config_hash: str, directory: Path,
             created: List[Path]) -> RunSummary:
    spin = build_spin(config)
    beta = spin.beta
    shifts = compute_shifts(spin, config.cutoff, config.shift_method) if config.cutoff else None

    files: Dict[str, str] = {}
    diagnostics: Dict[str, float] = {}
    primary: Optional[Trajectory] = None
    exact_extras: Dict[str, Optional[float]] = {}

    if config.runs_analytic:
        traj = _run_analytic(config, spin, shifts).with_metadata(config_hash=config_hash)
        path = traj.to_csv(directory / "trajectory_analytic.csv")
        created.append(path)
        files["trajectory_analytic"] = path.name
        primary = traj

    if config.runs_exact:
        traj, exact_extras = _run_exact(config, spin, directory, created)
        traj = traj.with_metadata(config_hash=config_hash)
        path = traj.to_csv(directory / "trajectory_exact.csv")
        created.append(path)
        files["trajectory_exact"] = path.name
        files["modes"] = "modes.csv"
        diagnostics.update(traj.diagnostics)
        primary = traj

    plot_path = write_plot_data(primary, directory / "plot.dat")
    created.append(plot_path)
    files["plot"] = plot_path.name

    spin_flip_time = 1.0 / beta if beta > 0 else None
    claims = None
    if spin.units == UnitMode.SI and spin_flip_time is not None:
        claims = LiteratureClaims.from_computed(spin.unit_system.to_si(spin_flip_time, QuantityKind.TIME))

    fitted = exact_extras.get("beta_fitted")
    summary = RunSummary(
        config_hash=config_hash,
        engine=config.engine.value,
        units=spin.units.value,
        alpha=spin.alpha,
        omega=spin.omega,
        beta_analytic=beta,
        beta_fitted=fitted,
        beta_fit_stderr=exact_extras.get("beta_fit_stderr"),
        beta_ratio=(fitted / beta) if (fitted is not None and beta > 0) else None,
        beta_golden_rule=exact_extras.get("beta_golden_rule"),
        decay_rate_convention=decay_rate_convention(spin.units),
        spin_flip_time=spin_flip_time,
        delta1=shifts.delta1 if shifts else None,
        delta2=shifts.delta2 if shifts else None,
        omega_shifted=shifts.omega_shifted if shifts else None,
        cutoff=config.cutoff,
        measure=config.measure if config.runs_exact else None,
        recurrence_time=exact_extras.get("recurrence_time"),
        literature_claims=claims,
        files={**files, "summary": "summary.json"},
        diagnostics=diagnostics,
    )
    summary_path = directory / "summary.json"
    created.append(summary_path)
    write_summary(summary, summary_path)
    return summary


def sweep_configs(config: SimulationConfig, axis: str,
                  values: Sequence[float]) -> List[Tuple[float, Optional[SimulationConfig], Optional[str]]]:
    """One config per value, or the validation error text in its place."""
    if axis not in SWEEPABLE_KEYS:
        raise ConfigError([ConfigViolation(axis, None, f"not sweepable; choose one of {', '.join(SWEEPABLE_KEYS)}")])
    base = config.model_dump()
    items = []
    for value in values:
        if not math.isfinite(value):
            raise ConfigError([ConfigViolation(axis, None, f"sweep values must be finite, got {value!r}")])
        try:
            items.append((value, SimulationConfig.model_validate({**base, axis: value}), None))
        except ValueError as exc:
            items.append((value, None, str(exc).replace("\n", " ")))
    return items


def sweep(config: SimulationConfig, axis: str, values: Sequence[float],
          directory: Optional[Union[str, Path]] = None,
          max_workers: Optional[int] = None) -> pd.DataFrame:
    """
    One run per value, executed concurrently, rows kept in input order.

    A failing run is recorded in its row's ``error`` column; the sweep goes on.
    """
    root = Path(directory) if directory is not None else (
        Path(config.output_dir or get_settings().OUTPUT_DIR) / f"sweep-{config.config_hash()[:12]}-{axis}"
    )
    root.mkdir(parents=True, exist_ok=True)
    items = sweep_configs(config, axis, values)

    def one(index: int, value: float, item: Optional[SimulationConfig], error: Optional[str]) -> Dict:
        row = {axis: value, **{column: None for column in SWEEP_COLUMNS}}
        if item is None:
            row["error"] = error
            return row
        try:
            summary = run(item, root / f"{index:03d}")
        except Exception as exc:
            logger.error(f"Sweep point {axis}={value!r} failed: {exc}")
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row
        row.update(
            beta_analytic=summary.beta_analytic,
            beta_fitted=summary.beta_fitted,
            omega_shifted=summary.omega_shifted,
            delta1=summary.delta1,
            delta2=summary.delta2,
        )
        return row

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(one, i, value, item, error) for i, (value, item, error) in enumerate(items)]
        rows = [future.result() for future in futures]

    table = pd.DataFrame(rows, columns=[axis, *SWEEP_COLUMNS])
    table.to_csv(root / "sweep.csv", index=False, float_format="%.17g")
    logger.info(f"Sweep over {axis} finished: {len(rows)} rows, {int(table['error'].notna().sum())} failed")
    return table


def report_text(summary: Union[RunSummary, str, Path]) -> str:
    """Human-readable comparison of the computed spin-flip time with the published estimate."""
    if not isinstance(summary, RunSummary):
        summary = read_summary(summary)
    lines = [
        f"run {summary.config_hash[:12]} ({summary.engine}, {summary.units} units)",
        f"  convention: {summary.decay_rate_convention}",
        f"  beta (analytic): {summary.beta_analytic:.6e}",
    ]
    if summary.spin_flip_time is not None:
        lines.append(f"  spin-flip time 1/beta: {summary.spin_flip_time:.6e}")
    if summary.beta_fitted is not None:
        lines.append(f"  beta (fitted): {summary.beta_fitted:.6e}  ratio {summary.beta_ratio:.4f}")
    if summary.omega_shifted is not None:
        lines.append(f"  shifts at cutoff {summary.cutoff:.6g}: delta1 {summary.delta1:.6e}, "
                     f"delta2 {summary.delta2:.6e}, Omega {summary.omega_shifted:.12g}")
    claims = summary.literature_claims
    if claims is None:
        lines.append("  published comparison: not available (requires units = si)")
    else:
        lines.extend([
            f"  published spin-flip time: {claims.published_spin_flip_time_s:.3e} s",
            f"  computed spin-flip time:  {claims.computed_spin_flip_time_s:.3e} s",
            f"  ratio computed/published: {claims.ratio:.3e}",
            f"  DISCREPANCY: {'yes' if claims.discrepancy else 'no'}",
            f"  note: {claims.note}",
        ])
    return "\n".join(lines)
