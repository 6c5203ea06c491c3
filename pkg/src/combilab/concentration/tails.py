from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from ..errors import ParameterError
from ..geometry.almost_constant import AlmostConstParams
from ..sampling.base import check_dimensions
from ..sampling.enumerate import (
    MATRIX_BUDGET,
    ROW_BUDGET,
    EnumeratedSource,
    matrix_count,
    row_count,
    support_table,
)
from ..sampling.random_rows import rows_dot, sample_supports_batch
from ..sampling.seeds import SeedSpec, as_generator
from .bounds import small_ball_rhs
from .levy import levy_estimate
from .moments import row_inner_moments
from .types import DiscreteDistribution, MarkovReport, TailReport, binomial_stderr

CONVOLUTION_BUDGET = 10**6

Seed = int | SeedSpec | np.random.Generator


def _exact_report(
    threshold: float, probability: float, total: int, bound: Optional[float]
) -> TailReport:
    return TailReport(
        threshold=threshold,
        empirical_prob=probability,
        bound=bound,
        trials=total,
        standard_error=0.0,
        exact=True,
    )


def slice_bound(v: np.ndarray, t: float) -> float:
    """2 exp(-t^2 / (8 sum v_i^2)), the bounded-differences bound on the slice."""
    weight = float(np.sum(np.asarray(v, dtype=np.float64) ** 2))
    if weight == 0.0:
        return 0.0 if t > 0 else 2.0
    return 2.0 * math.exp(-(t**2) / (8.0 * weight))


def slice_tail_check(
    v: np.ndarray,
    n: int,
    d: int,
    t: float,
    trials: int,
    seed: Seed = 0,
    exact: bool = False,
) -> TailReport:
    """P(|<q, v> - mu| >= t) for a uniform row q, against the slice bound."""
    check_dimensions(n, d)
    vector = np.asarray(v, dtype=np.float64)
    if vector.shape != (n,):
        raise ParameterError(f"v must have length {n}")
    if t < 0 or trials < 1:
        raise ParameterError("need t >= 0 and trials >= 1")
    mu, _ = row_inner_moments(vector, n, d)
    bound = slice_bound(vector, t)
    if exact and row_count(n, d) <= ROW_BUDGET:
        values = rows_dot(support_table(n, d), vector)
        hits = int(np.count_nonzero(np.abs(values - mu) >= t))
        return _exact_report(t, hits / values.size, values.size, bound)
    values = rows_dot(sample_supports_batch(n, d, trials, seed), vector)
    hits = int(np.count_nonzero(np.abs(values - mu) >= t))
    return TailReport.from_count(t, hits, trials, bound)


def direction_norms(
    v: np.ndarray, m: int, n: int, d: int, trials: int, seed: Seed
) -> np.ndarray:
    """||M v|| for ``trials`` independent m x n matrices."""
    supports = sample_supports_batch(n, d, trials * m, seed)
    values = rows_dot(supports, v).reshape(trials, m)
    return np.sqrt(np.sum(values**2, axis=1))


def direction_rate(
    v: np.ndarray,
    m: int,
    n: int,
    d: int,
    c: float,
    trials: int,
    seed: Seed = 0,
    exact: bool = False,
) -> TailReport:
    """Empirical P(||M v|| <= c sqrt(pn)); no analytic bound is attached."""
    check_dimensions(n, d, m)
    if 2 * m < n:
        raise ParameterError(f"need n/2 <= m <= n, got m={m}, n={n}")
    vector = np.asarray(v, dtype=np.float64)
    if vector.shape != (n,) or abs(float(np.linalg.norm(vector)) - 1.0) > 1e-10:
        raise ParameterError("v must be a unit vector of length n")
    if c <= 0 or trials < 1:
        raise ParameterError("need c > 0 and trials >= 1")
    threshold = c * math.sqrt(d)
    if exact and matrix_count(m, n, d) <= MATRIX_BUDGET:
        source = EnumeratedSource(m, n, d)
        row_values = rows_dot(source.table, vector)
        squares = row_values**2
        hits = 0
        # ||M v||^2 is a sum of m independent row contributions
        for digits in itertools.product(range(len(row_values)), repeat=m):
            if math.sqrt(math.fsum(squares[list(digits)])) <= threshold + 1e-12:
                hits += 1
        return _exact_report(threshold, hits / len(source), len(source), None)
    norms = direction_norms(vector, m, n, d, trials, seed)
    hits = int(np.count_nonzero(norms <= threshold))
    return TailReport.from_count(threshold, hits, trials, None)


def alternating_direction(n: int) -> np.ndarray:
    """Unit vector with entries +1, -1, +1, ... (last entry 0 when n is odd)."""
    raw = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    if n % 2:
        raw[-1] = 0.0
    return raw / np.linalg.norm(raw)


def direction_rate_grid(
    ns: Sequence[int], p: float, c: float, trials: int, seed: int = 0
) -> list[TailReport]:
    reports = []
    for n in ns:
        d = max(1, int(math.floor(p * n + 1e-9)))
        spec = SeedSpec(master_seed=seed, experiment=f"direction-rate:{n}")
        report = direction_rate(alternating_direction(n), n, n, d, c, trials, spec)
        logger.debug("direction rate n={} d={}: {}", n, d, report.empirical_prob)
        reports.append(report)
    return reports


def _convolve_average(
    distributions: Sequence[DiscreteDistribution], eps: float
) -> float:
    sums: dict[float, float] = {0.0: 1.0}
    for dist in distributions:
        merged: dict[float, float] = {}
        for total, mass in sums.items():
            for value, prob in zip(dist.values, dist.probabilities):
                key = total + value
                merged[key] = merged.get(key, 0.0) + mass * prob
        sums = merged
    limit = len(distributions) * eps + 1e-12
    return math.fsum(mass for total, mass in sums.items() if total <= limit)


def markov_avg_check(
    distributions: Sequence[DiscreteDistribution],
    eps: float,
    trials: int = 100_000,
    seed: Seed = 0,
) -> MarkovReport:
    """P(mean of Z_k <= eps) against (2/n) sum_k P(Z_k <= 2 eps)."""
    if not distributions:
        raise ParameterError("need at least one distribution")
    if eps < 0:
        raise ParameterError("eps must be nonnegative")
    n = len(distributions)
    rhs = 2.0 / n * math.fsum(dist.cdf(2.0 * eps) for dist in distributions)
    support = math.prod(len(dist.values) for dist in distributions)
    if support <= CONVOLUTION_BUDGET:
        lhs = _convolve_average(distributions, eps)
        return MarkovReport(lhs=lhs, rhs=rhs, exact=True)
    logger.warning(
        "Joint support {} exceeds {}; estimating by Monte Carlo",
        support,
        CONVOLUTION_BUDGET,
    )
    rng = as_generator(seed)
    average = np.zeros(trials)
    for dist in distributions:
        average += dist.sample(trials, rng)
    average /= n
    lhs = float(np.mean(average <= eps + 1e-12))
    return MarkovReport(
        lhs=lhs, rhs=rhs, exact=False, standard_error=binomial_stderr(lhs, trials)
    )


def small_ball_check(
    v: np.ndarray,
    n: int,
    d: int,
    eps: float,
    params: AlmostConstParams,
    gamma: float,
    mu_const: float,
    trials: int,
    seed: Seed = 0,
) -> TailReport:
    """Levy concentration of <q, v> at width eps sqrt(d/n) against the bound."""
    check_dimensions(n, d)
    bound = small_ball_rhs(eps, gamma, params.delta, params.rho, d, mu_const)
    values = rows_dot(sample_supports_batch(n, d, trials, seed), np.asarray(v))
    estimate = levy_estimate(values, eps * math.sqrt(d / n))
    return TailReport(
        threshold=estimate.width,
        empirical_prob=estimate.value,
        bound=bound.clamped,
        trials=trials,
        standard_error=binomial_stderr(estimate.value, trials),
    )
