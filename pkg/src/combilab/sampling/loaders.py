from __future__ import annotations

from typing import TYPE_CHECKING

from loguru import logger

from .base import MatrixSource
from .enumerate import EnumeratedSource, matrix_count
from .random_rows import SampledSource
from .seeds import SeedSpec

if TYPE_CHECKING:
    from ..config.schema import ExperimentConfig, GridPoint


def point_seed(cfg: "ExperimentConfig", study: str, index: int) -> SeedSpec:
    return SeedSpec(master_seed=cfg.seed, experiment=f"{study}:{index}")


def build_source(
    cfg: "ExperimentConfig",
    point: "GridPoint",
    study: str,
    index: int,
    prefer_exact: bool = False,
) -> MatrixSource:
    """Pick enumeration or Monte Carlo for one grid point.

    Enumeration is used when the config forces it, or when the study prefers it
    and the whole model at this point fits ``exact_budget``. A forced exact run
    over budget raises CapacityError from EnumeratedSource.
    """
    m, n, d = point.rows, point.n, point.d
    fits = matrix_count(m, n, d) <= cfg.exact_budget
    if cfg.exact or (prefer_exact and fits):
        logger.debug("{} point {}: enumerating {}x{} d={}", study, index, m, n, d)
        return EnumeratedSource(m, n, d, budget=cfg.exact_budget)
    return SampledSource(m, n, d, cfg.trials, point_seed(cfg, study, index))
