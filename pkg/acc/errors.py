# acc/errors.py
from typing import Any, Optional


class AccError(RuntimeError):
    """
    Base class for every failure raised by the library.
    `category` is the machine-readable tag the CLI prints on exit.
    """
    category = "internal"


class DimensionError(AccError):
    category = "dimension"


class DomainError(AccError, ValueError):
    category = "domain"


class ConvergenceError(AccError):
    category = "convergence"

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class BracketError(AccError, ValueError):
    category = "bracket"


class DivergenceError(AccError):
    category = "divergence"

    def __init__(self, message: str, cycle_index: int, trajectory: Any = None):
        super().__init__(message)
        self.cycle_index = cycle_index
        self.trajectory = trajectory


class SaturationError(AccError):
    category = "saturation"


class PoleError(AccError, ZeroDivisionError):
    category = "pole"


class RangeError(AccError, ValueError):
    category = "range"


class GrazingError(AccError):
    category = "grazing"


class UnsupportedTopologyError(AccError):
    category = "unsupported_topology"


class InsufficientDataError(AccError):
    category = "insufficient_data"


class SweepError(AccError):
    category = "sweep"


class ConfigError(AccError, ValueError):
    category = "config"


class OutputError(AccError):
    category = "io"

    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (path={path})")
        self.path = path
