"""Reproducible per-(trial, row) seed derivation.

Every random draw in the package is a pure function of a ``SeedSpec``: the
master seed plus the (experiment, trial, row) labels are folded through a
64-bit avalanche mixer, so trials can run on any worker in any order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ParameterError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """SplitMix64 finalizer."""
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def label_to_int(label: int | str) -> int:
    if isinstance(label, int):
        return label & MASK64
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    experiment: int | str = 0
    trial: int = 0
    row: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= MASK64:
            raise ParameterError("master_seed must be a 64-bit unsigned integer")

    def derive(self) -> int:
        state = mix64(self.master_seed)
        for position, component in enumerate(
            (label_to_int(self.experiment), self.trial & MASK64, self.row & MASK64),
            start=1,
        ):
            salt = (position * GOLDEN_GAMMA) & MASK64
            state = mix64(state ^ mix64(component ^ salt))
        return state

    def with_trial(self, trial: int) -> "SeedSpec":
        return replace(self, trial=trial, row=0)

    def with_row(self, row: int) -> "SeedSpec":
        return replace(self, row=row)

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.derive()))


def as_generator(seed: int | SeedSpec | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.rng()
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
