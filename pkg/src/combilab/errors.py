from __future__ import annotations


class CombilabError(Exception):
    """Base class for every error raised by the package."""

    exit_code: int = 1


class ParameterError(CombilabError, ValueError):
    exit_code = 2


class ConfigError(ParameterError):
    """Malformed or invalid experiment configuration."""


class CapacityError(CombilabError):
    """An enumeration or allocation budget would be exceeded."""

    exit_code = 3


class NumericalError(CombilabError):
    exit_code = 4


class SingularityError(NumericalError):
    pass


class RankError(NumericalError):
    def __init__(self, message: str, k: int | None = None) -> None:
        super().__init__(message)
        self.k = k


class FitError(NumericalError):
    pass


class EmissionError(NumericalError):
    def __init__(self, message: str, stat: str | None = None) -> None:
        super().__init__(message)
        self.stat = stat
