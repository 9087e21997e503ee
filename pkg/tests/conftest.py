# tests/conftest.py

import logging
import math
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pytest
from faker import Faker

from spinvac.models.spin import SpinSystem
from spinvac.operations.exact import FockTruncation, build_hamiltonian
from spinvac.verification import single_mode_set

# ======================================================================================
# Logging Configuration
# ======================================================================================
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# ======================================================================================
# Randomized Parameters
# ======================================================================================
fake = Faker()
Faker.seed(12345)


def create_fake_spin_parameters() -> Dict[str, float]:
    """
    Generate a random (alpha, omega, sz0) tuple in natural units.

    Returns:
        A dict with keys alpha, omega and sz0 (in units of hbar).
    """
    return {
        "alpha": fake.pyfloat(min_value=0.5, max_value=2.0),
        "omega": fake.pyfloat(min_value=0.5, max_value=2.0),
        "sz0": fake.pyfloat(min_value=-0.5, max_value=0.5),
    }


def write_config(directory: Path, text: str, name: str = "run.cfg") -> Path:
    """Write a configuration text and return its path."""
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path


# ======================================================================================
# Spin and Bath Fixtures
# ======================================================================================
@pytest.fixture
def unit_spin() -> SpinSystem:
    """alpha = omega = 1 in natural units."""
    return SpinSystem.direct(1.0, 1.0)


@pytest.fixture
def weak_spin() -> SpinSystem:
    """Unit Larmor frequency with beta / omega = 1e-3."""
    return SpinSystem.direct(math.sqrt(6.0 * math.pi ** 2 * 1e-3), 1.0)


@pytest.fixture
def fake_spin_parameters() -> Dict[str, float]:
    return create_fake_spin_parameters()


@pytest.fixture
def seed_spin_parameters(request) -> List[Dict[str, float]]:
    """
    Several random parameter tuples.

    Usage:
        @pytest.mark.parametrize("seed_spin_parameters", [5], indirect=True)
        def test_many(seed_spin_parameters):
            ...
    """
    try:
        count = request.param
    except AttributeError:
        count = 5
    tuples = [create_fake_spin_parameters() for _ in range(count)]
    logger.info(f"Seeded {len(tuples)} random spin parameter tuples.")
    return tuples


@pytest.fixture
def single_mode(unit_spin):
    """Resonant single mode coupled along x with strength 1e-2, n_max = 1."""
    def build(g: float = 1e-2, n_max: int = 1, spin: SpinSystem = None) -> Tuple:
        spin = spin or unit_spin
        modes = single_mode_set(spin, [g, 0.0, 0.0])
        trunc = FockTruncation(n_modes=1, n_max=n_max)
        return build_hamiltonian(spin, modes, trunc), trunc
    return build


@pytest.fixture
def output_root(tmp_path, monkeypatch) -> Path:
    """Point SPINVAC_OUTPUT_DIR at a temporary directory."""
    root = tmp_path / "runs"
    monkeypatch.setenv("SPINVAC_OUTPUT_DIR", str(root))
    return root


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


# ======================================================================================
# Pytest Command-Line Options and Test Collection
# ======================================================================================
def pytest_addoption(parser):
    """
    Add the --run-slow command line option.
    """
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run tests marked as slow"
    )


def pytest_collection_modifyitems(config, items):
    """
    Automatically skip slow tests unless --run-slow is specified.
    """
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="use --run-slow to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


# ======================================================================================
# How to Use This File
# ======================================================================================
"""
Basic Examples:

1. Randomized parameters:
   def test_rate(fake_spin_parameters):
       spin = SpinSystem.direct(fake_spin_parameters["alpha"], fake_spin_parameters["omega"])

2. A resonant single mode:
   def test_rabi(single_mode):
       hamiltonian, trunc = single_mode(g=1e-2)

Command Examples:
- Basic run: pytest
- Include the decay oracle and full verification: pytest --run-slow
- Show output: pytest -v -s
"""
