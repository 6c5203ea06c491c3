"""Concentration and anticoncentration estimates for random combinatorial rows."""

from .bounds import SmallBallBound, small_ball_rhs, small_ball_rhs_general
from .levy import levy_curve, levy_estimate
from .moments import row_inner_moments
from .tails import (
    alternating_direction,
    direction_rate,
    direction_rate_grid,
    markov_avg_check,
    slice_bound,
    slice_tail_check,
    small_ball_check,
)
from .types import (
    DiscreteDistribution,
    LevyEstimate,
    MarkovReport,
    TailReport,
    binomial_stderr,
)

__all__ = [
    "DiscreteDistribution",
    "LevyEstimate",
    "MarkovReport",
    "SmallBallBound",
    "TailReport",
    "alternating_direction",
    "binomial_stderr",
    "direction_rate",
    "direction_rate_grid",
    "levy_curve",
    "levy_estimate",
    "markov_avg_check",
    "row_inner_moments",
    "slice_bound",
    "slice_tail_check",
    "small_ball_check",
    "small_ball_rhs",
    "small_ball_rhs_general",
]
