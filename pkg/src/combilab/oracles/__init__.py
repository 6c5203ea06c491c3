"""Closed-form moments and their enumeration oracles."""

from .moments import (
    MomentReport,
    OracleValue,
    chebyshev_tail_check,
    column_sum_variance,
    column_sum_variance_mc,
    dist_tail_check,
    moments_check,
    x_second_moment,
    x_second_moment_cap,
    x_second_moment_oracle,
)

__all__ = [
    "MomentReport",
    "OracleValue",
    "chebyshev_tail_check",
    "column_sum_variance",
    "column_sum_variance_mc",
    "dist_tail_check",
    "moments_check",
    "x_second_moment",
    "x_second_moment_cap",
    "x_second_moment_oracle",
]
