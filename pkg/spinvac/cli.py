# spinvac/cli.py

import logging
import sys
from pathlib import Path
from typing import List

import click

from spinvac.core.config import get_settings
from spinvac.core.errors import ConfigError, SpinVacError
from spinvac.io import load_config, write_report
from spinvac.runner import report_text, run, sweep
from spinvac.schemas.config import VerifySuite
from spinvac.verification import run_suite

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _fail(exc: Exception) -> None:
    """Report an engine or configuration error and exit with status 2."""
    if isinstance(exc, ConfigError):
        for violation in exc.violations:
            click.echo(f"config error: {violation}", err=True)
    else:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    logger.error(f"{type(exc).__name__}: {exc}")
    sys.exit(2)


def _parse_values(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise click.BadParameter(f"values must be numbers separated by commas: {exc}")


@click.group()
@click.option("--log-level", default=None, help="Overrides SPINVAC_LOG_LEVEL.")
def main(log_level):
    """Spin-1/2 in the electromagnetic vacuum: analytic model, exact oracle, checks."""
    level = (log_level or get_settings().LOG_LEVEL).upper()
    logging.basicConfig(level=level, format=LOG_FORMAT)


@main.command("run")
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Run directory; defaults to <output root>/run-<hash>.")
def run_command(config, output_dir):
    """Run the engines configured in CONFIG."""
    try:
        summary = run(load_config(config), output_dir)
    except SpinVacError as exc:
        _fail(exc)
        return
    click.echo(f"beta_analytic = {summary.beta_analytic:.17g}")
    if summary.beta_fitted is not None:
        click.echo(f"beta_fitted   = {summary.beta_fitted:.17g} (ratio {summary.beta_ratio:.6f})")
    if summary.omega_shifted is not None:
        click.echo(f"omega_shifted = {summary.omega_shifted:.17g}")
    click.echo(f"summary: {summary.files.get('summary')}")


@main.command("verify")
@click.argument("suite", type=click.Choice([s.value for s in VerifySuite]), default="all")
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="JSON report path; defaults to <output root>/verify-<suite>.json.")
def verify_command(suite, report_path):
    """Run a verification SUITE; exits 1 if any check fails."""
    try:
        report = run_suite(VerifySuite(suite))
    except SpinVacError as exc:
        _fail(exc)
        return
    if report_path is None:
        root = Path(get_settings().OUTPUT_DIR)
        root.mkdir(parents=True, exist_ok=True)
        report_path = root / f"verify-{suite}.json"
    write_report(report, report_path)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"{status} {check.suite}/{check.name}: {check.achieved:.3e} <= {check.tolerance:.1e}")
    click.echo(f"report: {report_path}")
    if not report.passed:
        sys.exit(1)


@main.command("sweep")
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--axis", required=True, help="Sweepable config key.")
@click.option("--values", "values_text", required=True, help="Comma-separated values.")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--workers", type=int, default=None, help="Concurrent runs.")
def sweep_command(config, axis, values_text, output_dir, workers):
    """One run of CONFIG per value of AXIS; writes sweep.csv."""
    values = _parse_values(values_text)
    try:
        table = sweep(load_config(config), axis, values, output_dir, workers)
    except SpinVacError as exc:
        _fail(exc)
        return
    click.echo(table.to_string(index=False))


@main.command("report")
@click.argument("summary", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def report_command(summary):
    """Compare the spin-flip time in SUMMARY with the published estimate."""
    try:
        click.echo(report_text(summary))
    except (SpinVacError, ValueError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
