"""Spectral verification lab for random 0/1 matrices with fixed row sums."""

from .errors import (
    CapacityError,
    CombilabError,
    ConfigError,
    NumericalError,
    ParameterError,
)

__version__ = "0.1.1"

__all__ = [
    "CapacityError",
    "CombilabError",
    "ConfigError",
    "NumericalError",
    "ParameterError",
    "__version__",
]
