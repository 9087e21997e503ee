# spinvac/io.py

"""
Module: io.py

Configuration text parsing and artifact writers.

Config format: one ``key = value`` per line, ``#`` starts a comment, keys are
the flat SimulationConfig field names. Numbers may carry a unit suffix, which
requires ``units = si``:

- b_field: T, mT, G, gauss, kG
- t_max:   s, ms, us, ns
- charge:  C
- mass:    kg
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from spinvac.core.errors import ConfigError, ConfigViolation
from spinvac.models.trajectory import Trajectory
from spinvac.schemas.config import SimulationConfig, cross_field_problems
from spinvac.schemas.results import VerificationReport
from spinvac.schemas.summary import RunSummary

logger = logging.getLogger(__name__)

SUFFIXES: Dict[str, Dict[str, float]] = {
    "b_field": {"T": 1.0, "mT": 1e-3, "G": 1e-4, "gauss": 1e-4, "kG": 0.1},
    "t_max": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "charge": {"C": 1.0},
    "mass": {"kg": 1.0},
}
INTEGER_KEYS = {"n_freq", "n_angular", "panel_order", "n_max", "n_samples", "seed", "dimension_cap"}
BOOLEAN_KEYS = {"rotating_wave"}
TEXT_KEYS = {"engine", "units", "bath", "measure", "shift_method", "evolution_method", "output_dir"}
BOOLEAN_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

NUMBER_PATTERN = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-z]+)?$")


def _parse_value(key: str, raw: str) -> Tuple[Any, bool]:
    """Parsed value and whether an SI unit suffix was used."""
    if key in TEXT_KEYS:
        return (raw if key == "output_dir" else raw.lower()), False
    if key in BOOLEAN_KEYS:
        if raw.lower() not in BOOLEAN_WORDS:
            raise ValueError(f"expected true or false, got {raw!r}")
        return BOOLEAN_WORDS[raw.lower()], False
    match = NUMBER_PATTERN.match(raw)
    if not match:
        raise ValueError(f"not a number: {raw!r}")
    number, suffix = match.groups()
    if key in INTEGER_KEYS:
        if suffix:
            raise ValueError(f"integer key takes no unit suffix, got {suffix!r}")
        value = float(number)
        if value != int(value):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value), False
    if not suffix:
        return float(number), False
    table = SUFFIXES.get(key)
    if table is None or suffix not in table:
        allowed = ", ".join(table) if table else "none"
        raise ValueError(f"unknown unit suffix {suffix!r} (allowed: {allowed})")
    return float(number) * table[suffix], True


def parse_config(text: str) -> SimulationConfig:
    """
    Parse and validate a configuration text.

    Raises:
    - ConfigError: listing every violation with its key and line number.
    """
    known = set(SimulationConfig.model_fields)
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    violations: List[ConfigViolation] = []
    suffixed: List[str] = []

    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            violations.append(ConfigViolation("<syntax>", number, f"expected 'key = value', got {content!r}"))
            continue
        key, raw = (part.strip() for part in content.split("=", 1))
        key = key.lower()
        if key not in known:
            violations.append(ConfigViolation(key, number, "unknown key"))
            continue
        if key in lines:
            violations.append(ConfigViolation(key, number, f"duplicate key (first given on line {lines[key]})"))
            continue
        lines[key] = number
        if not raw:
            violations.append(ConfigViolation(key, number, "missing value"))
            continue
        try:
            values[key], has_suffix = _parse_value(key, raw)
        except ValueError as exc:
            violations.append(ConfigViolation(key, number, str(exc)))
            continue
        if has_suffix:
            suffixed.append(key)

    if str(values.get("units", "natural")).lower() != "si":
        for key in suffixed:
            violations.append(ConfigViolation(key, lines[key], "unit suffixes require units = si"))

    config: Optional[SimulationConfig] = None
    try:
        config = SimulationConfig.model_validate(values)
    except ValidationError as exc:
        for error in exc.errors():
            if not error["loc"]:
                continue
            key = str(error["loc"][0])
            violations.append(ConfigViolation(key, lines.get(key), error["msg"]))
        for key, message in cross_field_problems(values):
            violations.append(ConfigViolation(key, lines.get(key), message))

    if violations:
        violations.sort(key=lambda v: (v.line if v.line is not None else 0, v.key))
        logger.error(f"Configuration has {len(violations)} violation(s)")
        raise ConfigError(violations)
    logger.info(f"Parsed configuration {config.config_hash()[:12]} (engine={config.engine.value})")
    return config


def load_config(path: Union[str, Path]) -> SimulationConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_summary(summary: RunSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(_dump_json(summary.model_dump(mode="json")), encoding="utf-8")
    return path


def read_summary(path: Union[str, Path]) -> RunSummary:
    return RunSummary.model_validate_json(Path(path).read_text(encoding="utf-8"))


def write_report(report: VerificationReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(_dump_json(report.model_dump(mode="json")), encoding="utf-8")
    return path


def write_plot_data(traj: Trajectory, path: Union[str, Path]) -> Path:
    """Two blocks separated by blank lines: t vs <S_z>/hbar, then t vs |<S_+>|/hbar."""
    path = Path(path)
    hbar = 2.0 * traj.hbar_half
    engine = traj.metadata.get("engine", "unknown")
    blocks = [
        (f"# {engine}: t  sz/hbar", np.asarray(traj.sz) / hbar),
        (f"# {engine}: t  |splus|/hbar", np.abs(traj.splus) / hbar),
    ]
    chunks = []
    for header, column in blocks:
        rows = [f"{t:.17g} {v:.17g}" for t, v in zip(traj.times, column)]
        chunks.append("\n".join([header, *rows]))
    path.write_text("\n\n\n".join(chunks) + "\n", encoding="utf-8")
    return path
