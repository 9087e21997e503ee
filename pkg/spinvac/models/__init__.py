# spinvac/models/__init__.py
from .spin import SpinSystem
from .modes import Mode, ModeSet, PolarizationBasis
from .trajectory import Trajectory

__all__ = [
    "SpinSystem",
    "Mode",
    "ModeSet",
    "PolarizationBasis",
    "Trajectory",
]
