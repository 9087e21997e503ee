# spinvac/schemas/__init__.py

from .results import (
    ConvergenceLadder,
    DecayFit,
    KernelAsymptote,
    KernelBranch,
    MarkovianSolution,
    ShiftMethod,
    ShiftResult,
    VerificationCheck,
    VerificationReport,
)
from .config import BathKind, Engine, EvolutionMethod, SimulationConfig, VerifySuite
from .summary import LiteratureClaims, RunSummary

__all__ = [
    "ConvergenceLadder",
    "DecayFit",
    "KernelAsymptote",
    "KernelBranch",
    "MarkovianSolution",
    "ShiftMethod",
    "ShiftResult",
    "VerificationCheck",
    "VerificationReport",
    "BathKind",
    "Engine",
    "EvolutionMethod",
    "SimulationConfig",
    "VerifySuite",
    "LiteratureClaims",
    "RunSummary",
]
