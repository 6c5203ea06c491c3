"""Almost-constant vectors and combinatorial least common denominators."""

from .almost_constant import (
    AlmostConstParams,
    is_almost_constant,
    sample_almost_constant,
    sample_non_almost_constant,
)
from .clcd import (
    ClcdEstimate,
    ClcdParams,
    clcd_condition,
    clcd_estimate,
    difference_vector,
    lattice_distance,
)

__all__ = [
    "AlmostConstParams",
    "ClcdEstimate",
    "ClcdParams",
    "clcd_condition",
    "clcd_estimate",
    "difference_vector",
    "is_almost_constant",
    "lattice_distance",
    "sample_almost_constant",
    "sample_non_almost_constant",
]
