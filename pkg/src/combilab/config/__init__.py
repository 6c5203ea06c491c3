"""Configuration utilities."""

from .loader import (
    config_hash,
    dump_config,
    load_config,
    load_preset,
    parse_config,
    with_overrides,
)
from .schema import ExperimentConfig, GridPoint

__all__ = [
    "ExperimentConfig",
    "GridPoint",
    "config_hash",
    "dump_config",
    "load_config",
    "load_preset",
    "parse_config",
    "with_overrides",
]
