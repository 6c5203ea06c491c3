"""Second moment of the certificate residual and its brute-force oracles.

x = X_1 - P_1 X_1 is the part of the first row orthogonal to H_1, the span of
the remaining rows. The closed form bounds E[||x||^2 ; dim H_1 = n - 1] and
coincides with the conditional expectation given full rank when d is 1 or n.
Rank-deficient H_1 configurations are tallied separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from loguru import logger

from ..concentration.types import TailReport
from ..errors import CapacityError, NumericalError, ParameterError
from ..linalg.subspace import orthonormal_basis, project_onto_span
from ..sampling.base import check_dimensions
from ..sampling.enumerate import MATRIX_BUDGET, EnumeratedSource, matrix_count
from ..sampling.random_rows import SampledSource, sample_supports_batch
from ..sampling.seeds import SeedSpec

EXACT_TOLERANCE = 1e-10
OracleMode = Literal["auto", "exact", "mc"]


def _check_moment_args(n: int, d: int) -> None:
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    check_dimensions(n, d)


def x_second_moment_cap(n: int, d: int) -> float:
    return 3.0 * d / n


def x_second_moment(n: int, d: int) -> float:
    """(n-d)/(n-1) * (d/n + (d-1)/(n-1))."""
    _check_moment_args(n, d)
    value = (n - d) / (n - 1) * (d / n + (d - 1) / (n - 1))
    if value > x_second_moment_cap(n, d) + EXACT_TOLERANCE:
        raise NumericalError(f"closed form {value} exceeds the cap 3d/n at ({n},{d})")
    return value


def column_sum_variance(n: int, d: int) -> float:
    """Variance of one column sum over rows 2..n: Binomial(n-1, d/n)."""
    _check_moment_args(n, d)
    p = d / n
    return (n - 1) * p * (1.0 - p)


def column_sum_variance_mc(
    n: int, d: int, trials: int, seed: int | SeedSpec = 0
) -> tuple[float, float]:
    """Sample variance of the first column sum of n-1 rows, with its standard error."""
    _check_moment_args(n, d)
    if trials < 2:
        raise ParameterError("need at least 2 trials")
    supports = sample_supports_batch(n, d, trials * (n - 1), seed)
    hits = (supports == 0).any(axis=1).reshape(trials, n - 1).sum(axis=1)
    sums = hits.astype(np.float64)
    variance = float(np.var(sums, ddof=1))
    fourth = float(np.mean((sums - sums.mean()) ** 4))
    stderr = math.sqrt(max(fourth - variance**2, 0.0) / trials)
    return variance, stderr


@dataclass(frozen=True)
class OracleValue:
    """Brute-force statistics of dist(X_1, H_1)^2.

    ``full_rank`` is the expectation conditional on dim H_1 = n - 1 (None when
    that event has no mass), ``restricted`` is E[dist^2 ; dim H_1 = n - 1].
    """

    unconditional: float
    full_rank: Optional[float]
    restricted: float
    degenerate_mass: float
    exact: bool
    standard_error: float = 0.0
    samples: int = 0


def _exact_oracle(n: int, d: int) -> OracleValue:
    h1 = EnumeratedSource(n - 1, n, d, budget=MATRIX_BUDGET)
    candidates = h1.table.shape[0]
    total = 0.0
    restricted = 0.0
    degenerate = 0
    candidate_rows = np.zeros((candidates, n))
    np.put_along_axis(candidate_rows, h1.table, 1.0, axis=1)
    for index in range(len(h1)):
        basis = orthonormal_basis(h1.draw(index).dense, n)
        residual = candidate_rows - (candidate_rows @ basis) @ basis.T
        mean_sq = float(np.sum(residual**2)) / candidates
        total += mean_sq
        if basis.shape[1] == n - 1:
            restricted += mean_sq
        else:
            degenerate += 1
    configs = len(h1)
    full_mass = (configs - degenerate) / configs
    return OracleValue(
        unconditional=total / configs,
        full_rank=(restricted / configs) / full_mass if full_mass > 0 else None,
        restricted=restricted / configs,
        degenerate_mass=degenerate / configs,
        exact=True,
        samples=configs * candidates,
    )


def _sampled_oracle(n: int, d: int, trials: int, seed: int) -> OracleValue:
    if trials < 2:
        raise ParameterError("Monte Carlo oracle needs at least 2 trials")
    source = SampledSource(n, n, d, trials, SeedSpec(seed, experiment="x-moment"))
    squares = np.empty(trials)
    full = np.empty(trials, dtype=bool)
    for index in range(trials):
        rows = source.draw(index).dense
        _, residual, rank = project_onto_span(rows[0], rows[1:])
        squares[index] = float(residual @ residual)
        full[index] = rank == n - 1
    restricted_terms = np.where(full, squares, 0.0)
    full_count = int(full.sum())
    return OracleValue(
        unconditional=float(squares.mean()),
        full_rank=float(squares[full].mean()) if full_count else None,
        restricted=float(restricted_terms.mean()),
        degenerate_mass=1.0 - full_count / trials,
        exact=False,
        standard_error=float(restricted_terms.std(ddof=1) / math.sqrt(trials)),
        samples=trials,
    )


def x_second_moment_oracle(
    n: int, d: int, mode: OracleMode = "auto", trials: int = 10_000, seed: int = 0
) -> OracleValue:
    """Mean of dist(X_1, span{X_2..X_n})^2 by enumeration or simulation.

    ``auto`` enumerates when C(n,d)^n fits the matrix budget and otherwise falls
    back to Monte Carlo; ``exact`` raises CapacityError instead of falling back.
    """
    _check_moment_args(n, d)
    fits = matrix_count(n, n, d) <= MATRIX_BUDGET
    if mode == "exact" and not fits:
        raise CapacityError(
            f"C({n},{d})^{n} matrices exceed the budget {MATRIX_BUDGET}"
        )
    if mode != "mc" and fits:
        return _exact_oracle(n, d)
    if mode == "auto":
        logger.warning("({}, {}) too large to enumerate; using Monte Carlo", n, d)
    return _sampled_oracle(n, d, trials, seed)


@dataclass(frozen=True)
class MomentReport:
    n: int
    d: int
    formula_value: float
    oracle_value: Optional[float]
    abs_diff: Optional[float]
    unconditional: float
    restricted: float
    degenerate_mass: float
    cap: float
    relation: Literal["equal", "upper_bound"]
    exact: bool
    standard_error: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "formula_value": self.formula_value,
            "oracle_value": self.oracle_value,
            "abs_diff": self.abs_diff,
            "unconditional": self.unconditional,
            "restricted": self.restricted,
            "degenerate_mass": self.degenerate_mass,
            "cap": self.cap,
            "relation": self.relation,
            "exact": self.exact,
            "standard_error": self.standard_error,
            "passed": self.passed,
        }


def moments_check(
    n: int, d: int, mode: OracleMode = "auto", trials: int = 10_000, seed: int = 0
) -> MomentReport:
    """Closed form against the oracle.

    For d in {1, n} the closed form must equal the full-rank conditional mean
    (the unconditional mean when full rank has no mass). Otherwise it must
    dominate the restricted mean E[||x||^2 ; dim H_1 = n - 1].
    """
    formula = x_second_moment(n, d)
    oracle = x_second_moment_oracle(n, d, mode=mode, trials=trials, seed=seed)
    slack = 4.0 * oracle.standard_error
    tolerance = EXACT_TOLERANCE * max(1.0, formula) + slack
    if d in (1, n):
        relation: Literal["equal", "upper_bound"] = "equal"
        compared = oracle.full_rank
        if compared is None:
            compared = oracle.unconditional
        passed = abs(formula - compared) <= tolerance
    else:
        relation = "upper_bound"
        compared = oracle.full_rank
        passed = oracle.restricted <= formula + tolerance
    abs_diff = abs(formula - compared) if compared is not None else None
    if abs_diff is not None and abs_diff > tolerance:
        logger.info(
            "({}, {}): closed form {} vs full-rank oracle {} ({})",
            n,
            d,
            formula,
            compared,
            relation,
        )
    return MomentReport(
        n=n,
        d=d,
        formula_value=formula,
        oracle_value=compared,
        abs_diff=abs_diff,
        unconditional=oracle.unconditional,
        restricted=oracle.restricted,
        degenerate_mass=oracle.degenerate_mass,
        cap=x_second_moment_cap(n, d),
        relation=relation,
        exact=oracle.exact,
        standard_error=oracle.standard_error,
        passed=bool(passed and formula <= x_second_moment_cap(n, d)),
    )


def _residual_norms(n: int, d: int, trials: int, seed: int, row: int) -> np.ndarray:
    """dist(X_row, span of rows after it) over sampled matrices (0-based row)."""
    source = SampledSource(n, n, d, trials, SeedSpec(seed, experiment=f"tail:{row}"))
    norms = np.empty(trials)
    for index in range(trials):
        rows = source.draw(index).dense
        _, residual, _ = project_onto_span(rows[row], rows[row + 1 :])
        norms[index] = float(np.linalg.norm(residual))
    return norms


def chebyshev_tail_check(
    n: int, d: int, u: float, trials: int, seed: int = 0
) -> TailReport:
    """P(||x|| >= u) against 3d / (u^2 n)."""
    _check_moment_args(n, d)
    if u <= 0:
        raise ParameterError("u must be positive")
    norms = _residual_norms(n, d, trials, seed, row=0)
    hits = int(np.count_nonzero(norms >= u))
    return TailReport.from_count(u, hits, trials, 3.0 * d / (u**2 * n))


def dist_tail_check(n: int, d: int, t: float, trials: int, seed: int = 0) -> TailReport:
    """P(b_2 >= t sqrt(3p)) against 1/t^2, b_2 = dist(X_2, span{X_3..X_n})."""
    _check_moment_args(n, d)
    if t <= 0:
        raise ParameterError("t must be positive")
    norms = _residual_norms(n, d, trials, seed, row=1)
    threshold = t * math.sqrt(3.0 * d / n)
    hits = int(np.count_nonzero(norms >= threshold))
    return TailReport.from_count(threshold, hits, trials, 1.0 / t**2)
