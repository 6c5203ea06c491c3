from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
import statsmodels.api as sm

from ..errors import FitError, ParameterError
from .results import FitResult


def summarize(
    values: Sequence[float] | np.ndarray, exact: bool = False
) -> tuple[float, float, float]:
    """Mean, median and standard error of the mean.

    Exact (enumerated) samples carry a zero standard error.
    """
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return math.nan, math.nan, math.nan
    mean = float(np.mean(array))
    median = float(np.median(array))
    if exact or array.size < 2:
        return mean, median, 0.0
    return mean, median, float(np.std(array, ddof=1) / math.sqrt(array.size))


def rate(
    flags: Sequence[bool] | np.ndarray, exact: bool = False
) -> tuple[float, float, float]:
    array = np.asarray(flags, dtype=np.float64)
    if array.size == 0:
        return math.nan, math.nan, math.nan
    p = float(np.mean(array))
    stderr = 0.0 if exact else math.sqrt(p * (1.0 - p) / array.size)
    return p, p, stderr


def fit_loglog(points: Iterable[tuple[float, float]]) -> FitResult:
    """Ordinary least squares of log y on log x."""
    pairs = [(float(x), float(y)) for x, y in points]
    if any(x <= 0 or y <= 0 for x, y in pairs):
        raise ParameterError("log-log fit needs positive coordinates")
    if len({x for x, _ in pairs}) < 2:
        raise FitError("log-log fit needs at least two distinct abscissae")
    log_x = np.log([x for x, _ in pairs])
    log_y = np.log([y for _, y in pairs])
    model = sm.OLS(log_y, sm.add_constant(log_x)).fit()
    intercept, slope = (float(value) for value in model.params)
    residual = float(np.sum(model.resid**2))
    spread = float(np.sum((log_y - log_y.mean()) ** 2))
    if spread <= 1e-300:
        r_squared = 1.0 if residual <= 1e-24 else 0.0
    else:
        r_squared = 1.0 - residual / spread
    return FitResult(
        slope=slope,
        intercept=intercept,
        r_squared=min(1.0, max(0.0, r_squared)),
        points=len(pairs),
    )
