from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..errors import ParameterError
from .types import LevyEstimate


def levy_estimate(
    samples: Sequence[float] | np.ndarray,
    eps: float,
    weights: Optional[Sequence[float] | np.ndarray] = None,
) -> LevyEstimate:
    """Plug-in Levy concentration sup_x P(|X - x| < eps).

    The supremum is taken over windows [x_i, x_i + 2 eps) anchored at sample
    points, which attains the open-interval supremum for atomic measures.
    ``weights`` (summing to 1) turn the estimate into an exact expectation
    over an enumerated support.
    """
    values = np.asarray(samples, dtype=np.float64).ravel()
    if values.size == 0:
        raise ParameterError("levy_estimate needs at least one sample")
    if eps < 0:
        raise ParameterError(f"eps must be nonnegative, got {eps}")
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    starts = np.searchsorted(ordered, ordered, side="left")
    ends = np.searchsorted(ordered, ordered + 2.0 * eps, side="left")
    if weights is None:
        best = float((ends - starts).max()) / values.size
    else:
        mass = np.asarray(weights, dtype=np.float64).ravel()[order]
        cumulative = np.concatenate([[0.0], np.cumsum(mass)])
        best = float((cumulative[ends] - cumulative[starts]).max())
    return LevyEstimate(
        width=float(eps), value=min(best, 1.0), sample_count=int(values.size)
    )


def levy_curve(
    samples: Sequence[float] | np.ndarray, widths: Sequence[float]
) -> list[LevyEstimate]:
    return [levy_estimate(samples, eps) for eps in widths]
