from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from .base import CombMatrix, MatrixSource, RowVector, check_dimensions
from .seeds import SeedSpec, as_generator


def _shuffled_support(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    # first d entries of a uniform shuffle of [0, n) form a uniform d-subset
    return np.sort(rng.permutation(n)[:d])


def sample_row(n: int, d: int, seed: int | SeedSpec | np.random.Generator) -> RowVector:
    check_dimensions(n, d)
    support = _shuffled_support(n, d, as_generator(seed))
    return RowVector(n, tuple(int(i) for i in support))


def sample_matrix(m: int, n: int, d: int, seed: SeedSpec | int) -> CombMatrix:
    """Draw an m x n matrix with independent uniform rows.

    Row ``i`` uses the stream ``seed.with_row(i)``, so a matrix is a pure
    function of its ``SeedSpec``.
    """
    check_dimensions(n, d, m)
    spec = seed if isinstance(seed, SeedSpec) else SeedSpec(master_seed=int(seed))
    supports = np.empty((m, d), dtype=np.int64)
    for row in range(m):
        supports[row] = _shuffled_support(n, d, spec.with_row(row).rng())
    return CombMatrix(n=n, d=d, supports=supports)


def sample_supports_batch(
    n: int, d: int, count: int, seed: int | SeedSpec | np.random.Generator
) -> np.ndarray:
    """Draw ``count`` independent uniform supports from a single stream.

    Random keys followed by a partition give a uniform random d-subset per row;
    used by the concentration checks, which need many rows and no per-row labels.
    """
    check_dimensions(n, d)
    rng = as_generator(seed)
    if d == n:
        return np.tile(np.arange(n, dtype=np.int64), (count, 1))
    keys = rng.random((count, n))
    supports = np.argpartition(keys, d - 1, axis=1)[:, :d]
    return np.sort(supports, axis=1).astype(np.int64)


def rows_dot(supports: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Inner products <q, v> for each row support in ``supports``."""
    return np.asarray(v, dtype=np.float64)[supports].sum(axis=1)


class SampledSource(MatrixSource):
    """Monte Carlo draws: trial ``i`` is ``sample_matrix(seed.with_trial(i))``."""

    def __init__(self, m: int, n: int, d: int, trials: int, seed: SeedSpec) -> None:
        check_dimensions(n, d, m)
        if trials < 1:
            raise ParameterError("trials must be at least 1")
        self.m = m
        self.n = n
        self.d = d
        self.trials = trials
        self.seed = seed

    def __len__(self) -> int:
        return self.trials

    @property
    def exact(self) -> bool:
        return False

    def seed_for(self, index: int) -> SeedSpec:
        return self.seed.with_trial(index)

    def draw(self, index: int) -> CombMatrix:
        return sample_matrix(self.m, self.n, self.d, self.seed_for(index))
