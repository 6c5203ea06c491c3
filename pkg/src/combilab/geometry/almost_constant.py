from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ParameterError
from ..sampling.seeds import SeedSpec, as_generator

UNIT_TOLERANCE = 1e-10
MAX_ATTEMPTS = 10_000


@dataclass(frozen=True)
class AlmostConstParams:
    delta: float = 0.05
    rho: float = 0.05

    def __post_init__(self) -> None:
        for name in ("delta", "rho"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {value}")


def _check_unit(v: np.ndarray) -> np.ndarray:
    vector = np.asarray(v, dtype=np.float64)
    if vector.ndim != 1 or vector.size == 0:
        raise ParameterError("v must be a nonempty one-dimensional vector")
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise ParameterError(f"v must be a unit vector, got norm {norm!r}")
    return vector


def is_almost_constant(
    v: np.ndarray, params: AlmostConstParams = AlmostConstParams()
) -> tuple[bool, Optional[float]]:
    """Whether at least (1 - delta) n coordinates lie within rho/sqrt(n) of one level.

    Sorted coordinates are covered by a sliding window of width 2 rho/sqrt(n);
    the returned level is the midpoint of the widest-covering window's points.
    """
    vector = _check_unit(v)
    n = vector.size
    width = 2.0 * params.rho / math.sqrt(n)
    ordered = np.sort(vector)
    ends = np.searchsorted(ordered, ordered + width, side="right")
    counts = ends - np.arange(n)
    best = int(np.argmax(counts))
    if counts[best] < (1.0 - params.delta) * n - 1e-9:
        return False, None
    level = 0.5 * (ordered[best] + ordered[ends[best] - 1])
    return True, float(level)


def sample_almost_constant(
    n: int,
    params: AlmostConstParams = AlmostConstParams(),
    seed: int | SeedSpec | np.random.Generator = 0,
) -> np.ndarray:
    """Random unit vector with a (1 - delta) fraction of coordinates near one level.

    The base level is uniform in [-1, 1]/sqrt(n). Bulk coordinates are jittered
    within rho/(2 sqrt(n)) of it after normalization, and the remaining
    floor(delta n) coordinates are free Gaussian values. Draws that the
    classifier rejects are discarded.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    rng = as_generator(seed)
    free = int(math.floor(params.delta * n))
    jitter = params.rho / (2.0 * math.sqrt(n))
    for attempt in range(MAX_ATTEMPTS):
        shrink = 0.5 ** (attempt // 10)
        base = np.full(n, rng.uniform(-1.0, 1.0) / math.sqrt(n))
        if free:
            positions = rng.choice(n, size=free, replace=False)
            base[positions] = rng.standard_normal(free) / math.sqrt(n)
        scale = float(np.linalg.norm(base))
        if scale == 0.0:
            continue
        raw = base + shrink * scale * jitter * rng.uniform(-1.0, 1.0, size=n)
        vector = raw / np.linalg.norm(raw)
        accepted, _ = is_almost_constant(vector, params)
        if accepted:
            return vector
    raise ParameterError(f"could not draw an almost-constant vector for n={n}")


def sample_non_almost_constant(
    n: int,
    params: AlmostConstParams = AlmostConstParams(),
    seed: int | SeedSpec | np.random.Generator = 0,
) -> np.ndarray:
    """Uniform direction on the sphere, conditioned on failing the classifier."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    rng = as_generator(seed)
    for _ in range(MAX_ATTEMPTS):
        raw = rng.standard_normal(n)
        norm = float(np.linalg.norm(raw))
        if norm == 0.0:
            continue
        vector = raw / norm
        accepted, _ = is_almost_constant(vector, params)
        if not accepted:
            return vector
    raise ParameterError(
        f"every draw was almost constant for n={n}, "
        f"delta={params.delta}, rho={params.rho}"
    )
