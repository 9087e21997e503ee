# spinvac/core/errors.py
from dataclasses import dataclass
from typing import List, Optional


class SpinVacError(Exception):
    """Base class for every error raised by spinvac."""


class DomainError(SpinVacError, ValueError):
    """A precondition on an input value was violated."""


class ResolutionError(DomainError):
    """The time grid is too coarse for the requested quadrature."""

    def __init__(self, message: str, required_points: int):
        super().__init__(message)
        self.required_points = required_points


class AdmissibilityError(DomainError):
    """A spin history is outside the class the regulated kernel accepts."""

    def __init__(self, message: str, check: str):
        super().__init__(message)
        self.check = check


class FitError(SpinVacError, ValueError):
    """The decay fit is degenerate."""


class ResourceError(SpinVacError, RuntimeError):
    """The joint Hilbert space exceeds the configured amplitude cap."""

    def __init__(self, dimension: int, cap: int):
        super().__init__(
            f"Hilbert-space dimension {dimension} exceeds the cap of {cap} amplitudes"
        )
        self.dimension = dimension
        self.cap = cap


class EvolutionError(SpinVacError, RuntimeError):
    """Time evolution failed or lost unitarity beyond tolerance."""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class ConfigViolation:
    key: str
    line: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line is not None else "config"
        return f"{where}: {self.key}: {self.message}"


class ConfigError(SpinVacError, ValueError):
    """Raised with every violation found in a configuration text."""

    def __init__(self, violations: List[ConfigViolation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
