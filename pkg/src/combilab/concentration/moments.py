from __future__ import annotations

import math

import numpy as np

from ..sampling.base import check_dimensions


def row_inner_moments(v: np.ndarray, n: int, d: int) -> tuple[float, float]:
    """Mean and variance of <q, v> for q uniform over 0/1 rows with d ones.

    With p = d/n, mu = p * sum(v) and
    sigma2 = p(1-p) [sum v_i^2 - ((sum v_i)^2 - sum v_i^2) / (n-1)].
    """
    check_dimensions(n, d)
    values = [float(x) for x in np.asarray(v, dtype=np.float64)]
    p = d / n
    total = math.fsum(values)
    squares = math.fsum(x * x for x in values)
    mu = p * total
    if n == 1:
        return mu, 0.0
    cross = math.fsum([total * total, -squares]) / (n - 1)
    sigma2 = p * (1.0 - p) * math.fsum([squares, -cross])
    return mu, max(sigma2, 0.0)
