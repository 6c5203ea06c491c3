from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Callable, Optional, TypeVar

from ..errors import ConfigError

if TYPE_CHECKING:
    from ..config.schema import ExperimentConfig

T = TypeVar("T")

THREADS_ENV = "COMBILAB_THREADS"


def resolve_workers(
    explicit: Optional[int] = None, cfg: Optional["ExperimentConfig"] = None
) -> int:
    """Worker count from the argument, then the config, then COMBILAB_THREADS."""
    if explicit is not None:
        return max(1, int(explicit))
    if cfg is not None and cfg.workers is not None:
        return cfg.workers
    raw = os.getenv(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        return max(1, value)
    return 1


class TrialEngine:
    """Maps a pure per-trial function over trial indices, preserving index order.

    Dense LAPACK calls release the GIL, so a thread pool is enough; results are
    identical for any worker count because every trial depends only on its index.
    """

    def __init__(self, workers: int = 1) -> None:
        self.workers = max(1, workers)

    def map(self, fn: Callable[[int], T], count: int) -> list[T]:
        if self.workers == 1 or count < 2:
            return [fn(index) for index in range(count)]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, range(count)))
