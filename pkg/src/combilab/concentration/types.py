from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import ParameterError

SLACK_STDERR = 4.0


def binomial_stderr(probability: float, trials: int) -> float:
    return math.sqrt(max(probability * (1.0 - probability), 0.0) / trials)


@dataclass(frozen=True)
class LevyEstimate:
    width: float
    value: float
    sample_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "width": self.width,
            "value": self.value,
            "sample_count": self.sample_count,
        }


@dataclass(frozen=True)
class TailReport:
    """An empirical probability set against an analytic bound.

    ``bound`` is None when no closed-form bound is asserted. Exact reports come
    from enumeration and carry a zero standard error.
    """

    threshold: float
    empirical_prob: float
    bound: Optional[float]
    trials: int
    standard_error: float
    exact: bool = False

    @classmethod
    def from_count(
        cls, threshold: float, count: int, trials: int, bound: Optional[float]
    ) -> "TailReport":
        probability = count / trials
        return cls(
            threshold=threshold,
            empirical_prob=probability,
            bound=bound,
            trials=trials,
            standard_error=binomial_stderr(probability, trials),
        )

    @property
    def violation(self) -> bool:
        if self.bound is None:
            return False
        return self.empirical_prob > self.bound + SLACK_STDERR * self.standard_error

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.threshold,
            "empirical_prob": self.empirical_prob,
            "bound": self.bound,
            "trials": self.trials,
            "standard_error": self.standard_error,
            "exact": self.exact,
            "violation": self.violation,
        }


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported distribution on the nonnegative reals."""

    values: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values or len(self.values) != len(self.probabilities):
            raise ParameterError("values and probabilities must be nonempty and align")
        if any(value < 0 for value in self.values):
            raise ParameterError("support must be nonnegative")
        if any(prob < 0 for prob in self.probabilities):
            raise ParameterError("probabilities must be nonnegative")
        if not math.isclose(math.fsum(self.probabilities), 1.0, abs_tol=1e-12):
            raise ParameterError("probabilities must sum to 1")

    @classmethod
    def uniform(cls, values: Sequence[float]) -> "DiscreteDistribution":
        count = len(values)
        return cls(tuple(float(v) for v in values), tuple([1.0 / count] * count))

    @classmethod
    def point(cls, value: float) -> "DiscreteDistribution":
        return cls((float(value),), (1.0,))

    def cdf(self, x: float) -> float:
        return math.fsum(
            prob
            for value, prob in zip(self.values, self.probabilities)
            if value <= x + 1e-12
        )

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(
            np.asarray(self.values), size=size, p=np.asarray(self.probabilities)
        )


@dataclass(frozen=True)
class MarkovReport:
    lhs: float
    rhs: float
    exact: bool
    standard_error: float = 0.0

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + SLACK_STDERR * self.standard_error + 1e-12

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "exact": self.exact,
            "standard_error": self.standard_error,
            "passed": self.passed,
        }
