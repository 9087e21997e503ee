# tests/integration/test_runner.py

import json
import logging
import math

import numpy as np
import pandas as pd
import pytest

from spinvac import runner
from spinvac.core.errors import ConfigError, ResourceError
from spinvac.models.trajectory import Trajectory
from spinvac.runner import SWEEP_COLUMNS, _RunLog, build_spin, report_text, run, sweep, sweep_configs
from spinvac.schemas.config import SimulationConfig

ELECTRON = dict(units="si", charge=1.602176634e-19, mass=9.1093837015e-31, b_field=1.0)


# ======================================================================================
# Single Runs
# ======================================================================================

def test_analytic_run_artifacts(tmp_path):
    """An analytic run writes the trajectory, plot data, summary and a sidecar log."""
    config = SimulationConfig(alpha=1.0, omega=1.0, cutoff=10.0)
    summary = run(config, tmp_path / "out")
    out = tmp_path / "out"

    assert summary.files == {
        "trajectory_analytic": "trajectory_analytic.csv",
        "plot": "plot.dat",
        "summary": "summary.json",
    }
    for name in summary.files.values():
        assert (out / name).is_file()
    assert "starting" in (out / "run.log").read_text()

    assert summary.beta_analytic == pytest.approx(1.0 / (6.0 * math.pi ** 2), rel=1e-14)
    assert summary.spin_flip_time == pytest.approx(1.0 / summary.beta_analytic)
    assert summary.omega_shifted is not None
    assert summary.wall_clock_s > 0.0

    traj = Trajectory.from_csv(out / "trajectory_analytic.csv")
    assert len(traj) == 201
    assert traj.sz[0] == 0.5
    assert traj.times[-1] == pytest.approx(10.0 / summary.beta_analytic)

    stored = json.loads((out / "summary.json").read_text())
    assert stored["config_hash"] == config.config_hash()
    assert "wall_clock_s" not in stored


def test_run_is_deterministic(tmp_path):
    """The same config produces byte-identical artifacts."""
    config = SimulationConfig(alpha=0.7, omega=1.3, theta=1.0, phi=0.3, cutoff=5.0)
    run(config, tmp_path / "a")
    run(config, tmp_path / "b")
    for name in ("trajectory_analytic.csv", "plot.dat", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_default_run_directory(output_root):
    config = SimulationConfig(alpha=1.0, omega=1.0)
    run(config)
    assert (output_root / f"run-{config.config_hash()[:12]}" / "summary.json").is_file()


def test_si_run_reports_discrepancy(tmp_path):
    """An electron at 1 T decays in about 7e10 s, far from the published 5e6 s."""
    summary = run(SimulationConfig(**ELECTRON, t_max=1.0), tmp_path)
    claims = summary.literature_claims
    assert claims is not None
    assert claims.computed_spin_flip_time_s == pytest.approx(7.15e10, rel=2e-3)
    assert claims.ratio == pytest.approx(7.15e10 / 5e6, rel=2e-3)
    assert claims.discrepancy is True

    text = report_text(tmp_path / "summary.json")
    assert "DISCREPANCY: yes" in text
    assert "published spin-flip time: 5.000e+06 s" in text


def test_natural_run_has_no_published_comparison(tmp_path):
    summary = run(SimulationConfig(alpha=1.0, omega=1.0), tmp_path)
    assert summary.literature_claims is None
    assert "not available (requires units = si)" in report_text(summary)


def test_coupling_scale_enters_alpha():
    spin = build_spin(SimulationConfig(alpha=1.0, omega=1.0, coupling_scale=0.5))
    assert spin.alpha == 0.5
    assert spin.beta == pytest.approx(0.25 / (6.0 * math.pi ** 2), rel=1e-14)


def test_both_engines(tmp_path):
    """A three-level ladder: exact trajectory, modes, fitted rate and diagnostics."""
    alpha = math.sqrt(6.0 * math.pi ** 2 * 1e-2)
    config = SimulationConfig(engine="both", alpha=alpha, omega=1.0, n_freq=3, n_samples=101)
    summary = run(config, tmp_path)

    assert {"trajectory_analytic", "trajectory_exact", "modes", "plot", "summary"} <= set(summary.files)
    modes = pd.read_csv(tmp_path / "modes.csv")
    assert len(modes) == 6
    assert summary.recurrence_time == pytest.approx(math.pi / summary.beta_analytic, rel=1e-9)
    assert summary.beta_golden_rule > 0.0
    assert summary.beta_fitted is not None
    assert summary.beta_ratio == pytest.approx(summary.beta_fitted / summary.beta_analytic)
    assert summary.measure == "rate_matched"
    assert summary.diagnostics["norm_drift"] < 1e-10
    assert (tmp_path / "plot.dat").read_text().startswith("# exact")

    exact = Trajectory.from_csv(tmp_path / "trajectory_exact.csv")
    assert exact.times[-1] == pytest.approx(0.8 * summary.recurrence_time)
    assert exact.photon_number is not None


def test_failed_run_leaves_nothing(tmp_path):
    """Over the amplitude cap the run fails and removes what it created."""
    config = SimulationConfig(engine="exact", alpha=1.0, omega=1.0, n_freq=6, dimension_cap=4096)
    target = tmp_path / "fresh"
    with pytest.raises(ResourceError):
        run(config, target)
    assert not target.exists()

    existing = tmp_path / "existing"
    existing.mkdir()
    with pytest.raises(ResourceError):
        run(config, existing)
    assert existing.is_dir()
    assert list(existing.iterdir()) == []


# ======================================================================================
# Sweeps
# ======================================================================================

def test_sweep_omega_cubic(tmp_path):
    """beta scales as omega^3: doubling omega twice gives 1 : 8 : 64."""
    table = sweep(SimulationConfig(alpha=1.0, omega=1.0), "omega", [1.0, 2.0, 4.0], tmp_path)
    assert list(table.columns) == ["omega", *SWEEP_COLUMNS]
    assert table["omega"].tolist() == [1.0, 2.0, 4.0]
    beta = table["beta_analytic"].to_numpy()
    assert beta[1] / beta[0] == pytest.approx(8.0, rel=1e-12)
    assert beta[2] / beta[0] == pytest.approx(64.0, rel=1e-12)
    assert table["error"].isna().all()
    assert (tmp_path / "sweep.csv").is_file()
    assert (tmp_path / "002" / "summary.json").is_file()


def test_sweep_alpha_quadratic(tmp_path):
    table = sweep(SimulationConfig(alpha=1.0, omega=1.0), "alpha", [1.0, 2.0], tmp_path, max_workers=1)
    beta = table["beta_analytic"].to_numpy()
    assert beta[1] / beta[0] == pytest.approx(4.0, rel=1e-12)


def test_sweep_cutoff_lowers_shifted_frequency(tmp_path):
    table = sweep(SimulationConfig(alpha=1.0, omega=1.0, cutoff=10.0), "cutoff", [3.0, 10.0, 30.0], tmp_path)
    shifted = table["omega_shifted"].to_numpy()
    assert shifted[0] > shifted[1] > shifted[2]


def test_sweep_records_failures(tmp_path):
    """A failing point fills its error column and the others still run."""
    table = sweep(SimulationConfig(alpha=1.0, omega=1.0, cutoff=10.0), "cutoff", [1.5, 10.0], tmp_path)
    assert table.loc[0, "error"].startswith("DomainError")
    assert pd.isna(table.loc[1, "error"])
    assert table.loc[1, "delta2"] > 0.0


def test_sweep_validation_failure_row():
    items = sweep_configs(SimulationConfig(alpha=1.0, omega=1.0), "n_samples", [1.0, 11.0])
    assert items[0][1] is None and "n_samples" in items[0][2]
    assert items[1][1].n_samples == 11


@pytest.mark.parametrize(
    "axis, values",
    [("engine", [1.0]), ("omega", [math.nan]), ("omega", [math.inf])],
    ids=["not_sweepable", "nan", "infinite"],
)
def test_sweep_axis_errors(axis, values):
    with pytest.raises(ConfigError):
        sweep_configs(SimulationConfig(alpha=1.0, omega=1.0), axis, values)


def test_sweep_isolates_unexpected_errors(tmp_path, monkeypatch):
    """A numerical library error in one point is recorded in its row only."""
    real_run = runner.run

    def flaky(item, directory):
        if item.omega == 2.0:
            raise np.linalg.LinAlgError("eigenvalues did not converge")
        return real_run(item, directory)

    monkeypatch.setattr(runner, "run", flaky)
    table = sweep(SimulationConfig(alpha=1.0, omega=1.0), "omega", [1.0, 2.0, 4.0], tmp_path, max_workers=3)
    assert table.loc[1, "error"] == "LinAlgError: eigenvalues did not converge"
    assert table.loc[[0, 2], "error"].isna().all()
    assert table.loc[2, "beta_analytic"] / table.loc[0, "beta_analytic"] == pytest.approx(64.0, rel=1e-12)


# ======================================================================================
# Run Logs
# ======================================================================================

def test_overlapping_run_logs_restore_level(tmp_path):
    """Run logs that close out of order leave the package logger at its original level."""
    package_logger = logging.getLogger("spinvac")
    original = package_logger.level
    package_logger.setLevel(logging.WARNING)
    try:
        first = _RunLog(tmp_path / "first.log", "DEBUG")
        second = _RunLog(tmp_path / "second.log", "DEBUG")
        first.__enter__()
        second.__enter__()
        first.__exit__(None, None, None)
        assert package_logger.level == logging.DEBUG
        second.__exit__(None, None, None)
        assert package_logger.level == logging.WARNING
        assert first.handler not in package_logger.handlers
        assert second.handler not in package_logger.handlers
    finally:
        package_logger.setLevel(original)


def test_concurrent_sweep_keeps_logger_level(tmp_path):
    package_logger = logging.getLogger("spinvac")
    original = package_logger.level
    package_logger.setLevel(logging.ERROR)
    try:
        sweep(SimulationConfig(alpha=1.0, omega=1.0), "omega", [1.0, 1.5, 2.0, 2.5, 3.0, 3.5], tmp_path, max_workers=4)
        assert package_logger.level == logging.ERROR
    finally:
        package_logger.setLevel(original)
