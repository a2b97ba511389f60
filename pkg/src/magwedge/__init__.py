"""Bound-state certificates for magnetic Robin/Neumann Laplacians on wedges
and magnetic δ-interactions on broken lines."""

from .errors import NumericalError, SpectrumError
from .fiber import FiberConfig, FiberKind, FiberModel, ThresholdResult, band_value, threshold

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "SpectrumError",
    "FiberConfig",
    "FiberKind",
    "FiberModel",
    "ThresholdResult",
    "band_value",
    "threshold",
]
