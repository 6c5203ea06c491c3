"""Certified bracketing of the combinatorial least common denominator.

CLCD(v) = inf{theta > 0 : dist(theta D(v), Z^k) < min(gamma ||theta D(v)||, alpha)}.
Scanning a grid only ever proves an upper bound. Lower bounds come from two
facts: below 1 / (2 ||D||_inf) every coordinate of theta D rounds to zero, so
the lattice distance equals theta ||D|| and the condition fails outright; and
the lattice distance is ||D||-Lipschitz in theta, so a grid cell is cleared
when the distance at its left end minus h ||D|| still exceeds the right-end
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..errors import CapacityError, ParameterError

DIFFERENCE_BUDGET = 10**7
CHUNK_ELEMENTS = 2_000_000


def difference_vector(v: np.ndarray) -> np.ndarray:
    """Pairwise differences v_i - v_j for i < j in lexicographic order."""
    vector = np.asarray(v, dtype=np.float64)
    n = vector.size
    if vector.ndim != 1 or n < 2:
        raise ParameterError("difference vector needs n >= 2")
    k = n * (n - 1) // 2
    if k > DIFFERENCE_BUDGET:
        raise CapacityError(f"C({n},2) = {k} exceeds the budget {DIFFERENCE_BUDGET}")
    i, j = np.triu_indices(n, k=1)
    return vector[i] - vector[j]


def lattice_distance(points: np.ndarray) -> np.ndarray:
    """Euclidean distance of each row of ``points`` to the integer lattice."""
    array = np.asarray(points, dtype=np.float64)
    return np.linalg.norm(array - np.rint(array), axis=-1)


@dataclass(frozen=True)
class ClcdParams:
    gamma: float
    alpha: float
    theta_max: float
    grid_step: float

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")
        for name in ("alpha", "theta_max", "grid_step"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    @classmethod
    def defaults(
        cls,
        n: int,
        delta: float = 0.05,
        rho: float = 0.05,
        gamma: Optional[float] = None,
        mu: float = 0.1,
        theta_max_factor: float = 4.0,
        grid_fraction: float = 1e-3,
    ) -> "ClcdParams":
        theta_max = theta_max_factor * math.sqrt(n)
        return cls(
            gamma=gamma if gamma is not None else delta * rho / 24.0,
            alpha=mu * n,
            theta_max=theta_max,
            grid_step=grid_fraction * theta_max,
        )


@dataclass(frozen=True)
class ClcdEstimate:
    lower: float
    upper: float
    witness_theta: Optional[float]
    resolution: float

    def to_dict(self) -> dict[str, Any]:
        def encode(value: float) -> float | str:
            return "inf" if math.isinf(value) else value

        return {
            "lower": encode(self.lower),
            "upper": encode(self.upper),
            "witness_theta": self.witness_theta,
            "resolution": self.resolution,
        }


def clcd_condition(theta: float, D: np.ndarray, gamma: float, alpha: float) -> bool:
    point = theta * np.asarray(D, dtype=np.float64)
    threshold = min(gamma * float(np.linalg.norm(point)), alpha)
    return bool(float(lattice_distance(point)) < threshold)


def clcd_estimate(v: np.ndarray, params: ClcdParams) -> ClcdEstimate:
    D = difference_vector(v)
    norm = float(np.linalg.norm(D))
    if norm == 0.0:
        return ClcdEstimate(math.inf, math.inf, None, params.grid_step)
    h = params.grid_step
    start = 0.5 / float(np.abs(D).max())
    if start >= params.theta_max:
        return ClcdEstimate(params.theta_max, math.inf, None, h)

    count = int(math.floor((params.theta_max - start) / h)) + 1
    chunk = max(1, CHUNK_ELEMENTS // D.size)
    lower: Optional[float] = None
    for offset in range(0, count, chunk):
        thetas = start + h * np.arange(offset, min(offset + chunk, count))
        distances = lattice_distance(thetas[:, None] * D[None, :])
        thresholds = np.minimum(params.gamma * thetas * norm, params.alpha)
        satisfied = np.flatnonzero(distances < thresholds)
        right = np.minimum(params.gamma * (thetas + h) * norm, params.alpha)
        uncleared = np.flatnonzero(distances - h * norm < right)
        if lower is None and uncleared.size:
            lower = float(thetas[uncleared[0]])
        if satisfied.size:
            witness = float(thetas[satisfied[0]])
            return ClcdEstimate(
                lower if lower is not None else witness, witness, witness, h
            )
    if lower is None:
        lower = params.theta_max
    return ClcdEstimate(lower, math.inf, None, h)
