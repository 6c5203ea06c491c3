from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
from loguru import logger

from ..concentration.moments import row_inner_moments
from ..concentration.tails import markov_avg_check, slice_tail_check, small_ball_check
from ..concentration.types import SLACK_STDERR, DiscreteDistribution
from ..config.loader import config_hash
from ..config.schema import ExperimentConfig
from ..errors import RankError
from ..geometry.almost_constant import AlmostConstParams, sample_non_almost_constant
from ..geometry.clcd import ClcdParams, clcd_estimate, difference_vector
from ..linalg.certificate import decomposition_check, witness_certificate
from ..linalg.modular import is_singular_exact
from ..linalg.spectrum import spectrum
from ..linalg.subspace import biorthogonal_duals
from ..oracles.moments import (
    chebyshev_tail_check,
    column_sum_variance,
    column_sum_variance_mc,
    dist_tail_check,
    moments_check,
)
from ..report.builder import to_native
from ..sampling.enumerate import EnumeratedSource, support_table
from ..sampling.random_rows import SampledSource, rows_dot, sample_supports_batch
from ..sampling.seeds import SeedSpec

# Constants
CERTIFICATE_NS = (8, 32, 128)
CERTIFICATE_MATRICES = 10_000
DECOMPOSITION_NS = (8, 16, 32)
DECOMPOSITION_MATRICES = 1_000
CLCD_NS = (12, 16, 24)
CLCD_VECTORS = 1_000
PROPERTY_CASES = 10_000
MOMENT_CASES = ((2, 1), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3), (5, 2))
TINY_SINGULAR_RATES = {(2, 1): 0.5, (3, 1): 7.0 / 9.0, (3, 2): 7.0 / 9.0}
CERTIFICATE_TOLERANCE = 1e-8
HAND_CLCD = 10.0 / 11.0


@dataclass
class CheckResult:
    """Container for primary vs cross-check comparisons."""

    primary: Any
    cross_check: Any
    tolerance: Optional[float]
    difference: Any
    passed: bool
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "primary": to_native(self.primary),
            "cross_check": to_native(self.cross_check),
            "tolerance": self.tolerance,
            "difference": to_native(self.difference),
            "passed": bool(self.passed),
            "note": self.note,
        }


def _count_check(violations: int, note: str) -> CheckResult:
    return CheckResult(violations, 0, 0.0, violations, violations == 0, note)


def _all_passed(block: Any) -> bool:
    if isinstance(block, dict):
        if "passed" in block and isinstance(block["passed"], bool):
            return block["passed"]
        return all(_all_passed(value) for value in block.values())
    return True


class VerificationReport:
    """Property suite over the bounds; ``scale`` multiplies every sample count."""

    def __init__(self, cfg: ExperimentConfig, scale: float = 1.0) -> None:
        self.cfg = cfg
        self.scale = scale
        self.params = AlmostConstParams(
            cfg.almost_constant.delta, cfg.almost_constant.rho
        )
        self._report: Optional[Dict[str, Any]] = None

    def _count(self, base: int, minimum: int = 2) -> int:
        return max(minimum, int(round(base * self.scale)))

    def _seed(self, label: str, trial: int = 0) -> SeedSpec:
        return SeedSpec(self.cfg.seed, experiment=f"verify:{label}", trial=trial)

    @property
    def gamma(self) -> float:
        if self.cfg.clcd.gamma is not None:
            return self.cfg.clcd.gamma
        return self.params.delta * self.params.rho / 24.0

    def run(self) -> Dict[str, Any]:
        logger.info("Running verification suite at scale {}", self.scale)
        report: Dict[str, Any] = {
            "metadata": {
                "seed": self.cfg.seed,
                "scale": self.scale,
                "config_hash": config_hash(self.cfg),
            },
            "certificate": self._certificate_block(),
            "decomposition": self._decomposition_block(),
            "slice_concentration": self._slice_block(),
            "averaging_inequality": self._markov_block(),
            "chebyshev_tails": self._chebyshev_block(),
            "small_ball": self._small_ball_block(),
            "clcd": self._clcd_block(),
            "dual_norms": self._dual_block(),
            "singularity": self._singularity_block(),
            "moments": self._moments_block(),
        }
        report["passed"] = _all_passed(report)
        self._report = report
        if report["passed"]:
            logger.info("Verification passed")
        else:
            failed = [key for key, block in report.items() if not _all_passed(block)]
            logger.error("Verification failed in: {}", ", ".join(failed))
        return report

    def write(self, path: str | Path) -> Path:
        report = self._report if self._report is not None else self.run()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(to_native(report), sort_keys=True, indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info("Saved verification report to {}", path)
        return path

    def _matrices(self, label: str, n: int, count: int) -> Iterable[Any]:
        source = SampledSource(n, n, n // 2, count, self._seed(label))
        return (source.draw(index) for index in range(count))

    def _certificate_block(self) -> Dict[str, Any]:
        per_n = self._count(CERTIFICATE_MATRICES // len(CERTIFICATE_NS))
        block: Dict[str, Any] = {}
        for n in CERTIFICATE_NS:
            violations = checked = 0
            worst = math.inf
            for matrix in self._matrices(f"certificate:{n}", n, per_n):
                summary = spectrum(matrix)
                if summary.exactly_singular:
                    continue
                certificate = witness_certificate(matrix)
                margin = certificate.bound - summary.sn
                worst = min(worst, margin / summary.s1)
                checked += 1
                if margin < -CERTIFICATE_TOLERANCE * summary.s1:
                    violations += 1
            result = _count_check(
                violations, f"{checked} invertible matrices at d=n/2"
            )
            result.cross_check = worst
            block[f"n{n}"] = result.to_dict()
        return block

    def _decomposition_block(self) -> Dict[str, Any]:
        per_n = self._count(DECOMPOSITION_MATRICES // len(DECOMPOSITION_NS))
        block: Dict[str, Any] = {}
        for n in DECOMPOSITION_NS:
            worst = 0.0
            skipped = 0
            for matrix in self._matrices(f"decomposition:{n}", n, per_n):
                if is_singular_exact(matrix):
                    skipped += 1
                    continue
                try:
                    worst = max(worst, decomposition_check(matrix).max_residual)
                except RankError:
                    skipped += 1
            block[f"n{n}"] = CheckResult(
                worst,
                None,
                CERTIFICATE_TOLERANCE,
                worst,
                worst < CERTIFICATE_TOLERANCE,
                f"{skipped} singular or degenerate matrices skipped",
            ).to_dict()
        return block

    def _slice_block(self) -> Dict[str, Any]:
        cases = self._count(PROPERTY_CASES // 100)
        rng = self._seed("slice").rng()
        violations = 0
        for case in range(cases):
            n = int(rng.integers(4, 41))
            d = int(rng.integers(1, n + 1))
            v = rng.standard_normal(n)
            t = float(rng.uniform(0.1, 2.0)) * math.sqrt(float(v @ v))
            report = slice_tail_check(v, n, d, t, 200, self._seed("slice", case))
            violations += int(report.violation)
        return {
            "violations": _count_check(
                violations, f"{cases} (v, n, d, t) configurations"
            ).to_dict()
        }

    def _markov_block(self) -> Dict[str, Any]:
        cases = self._count(PROPERTY_CASES // 100)
        rng = self._seed("markov").rng()
        violations = 0
        for case in range(cases):
            count = int(rng.integers(1, 6))
            distributions = []
            for _ in range(count):
                size = int(rng.integers(1, 5))
                values = np.round(rng.uniform(0.0, 2.0, size=size), 2)
                weights = rng.dirichlet(np.ones(values.size))
                distributions.append(
                    DiscreteDistribution(
                        tuple(values.tolist()), tuple(weights.tolist())
                    )
                )
            eps = float(rng.uniform(0.05, 1.5))
            report = markov_avg_check(
                distributions, eps, trials=2000, seed=self._seed("markov", case)
            )
            violations += int(not report.passed)
        return {
            "violations": _count_check(
                violations, f"{cases} random families"
            ).to_dict()
        }

    def _chebyshev_block(self) -> Dict[str, Any]:
        trials = self._count(2000, minimum=20)
        block: Dict[str, Any] = {}
        for n, d in ((8, 4), (16, 8), (16, 2)):
            for u in (0.75, 1.0, 2.0):
                report = chebyshev_tail_check(n, d, u, trials, seed=self.cfg.seed)
                block[f"x_n{n}_d{d}_u{u:g}"] = CheckResult(
                    report.empirical_prob,
                    report.bound,
                    SLACK_STDERR * report.standard_error,
                    report.empirical_prob - (report.bound or 0.0),
                    not report.violation,
                ).to_dict()
            for t in (1.0, 2.0):
                report = dist_tail_check(n, d, t, trials, seed=self.cfg.seed)
                block[f"b2_n{n}_d{d}_t{t:g}"] = CheckResult(
                    report.empirical_prob,
                    report.bound,
                    SLACK_STDERR * report.standard_error,
                    report.empirical_prob - (report.bound or 0.0),
                    not report.violation,
                ).to_dict()
        return block

    def _small_ball_block(self) -> Dict[str, Any]:
        cases = self._count(PROPERTY_CASES // 200)
        violations = 0
        for case in range(cases):
            n = CLCD_NS[case % len(CLCD_NS)]
            v = sample_non_almost_constant(n, self.params, self._seed("ball-v", case))
            report = small_ball_check(
                v,
                n,
                n // 2,
                eps=0.1,
                params=self.params,
                gamma=self.gamma,
                mu_const=self.cfg.clcd.mu,
                trials=500,
                seed=self._seed("ball", case),
            )
            violations += int(report.violation)
        return {
            "violations": _count_check(
                violations, "Levy concentration against the small-ball bound"
            ).to_dict()
        }

    def _clcd_block(self) -> Dict[str, Any]:
        vectors = self._count(CLCD_VECTORS // len(CLCD_NS), minimum=1)
        clcd = self.cfg.clcd
        block: Dict[str, Any] = {}
        for n in CLCD_NS:
            params = ClcdParams.defaults(
                n,
                self.params.delta,
                self.params.rho,
                gamma=self.gamma,
                mu=clcd.mu,
                theta_max_factor=clcd.theta_max_factor,
                grid_fraction=clcd.grid_fraction,
            )
            floor = math.sqrt(self.params.delta * n) / 7.0
            # delta rho sqrt(n) / (4 sqrt(2))
            spread = self.params.delta * self.params.rho * math.sqrt(n / 32.0)
            worst = shortest = math.inf
            for index in range(vectors):
                seed = self._seed(f"clcd:{n}", index)
                v = sample_non_almost_constant(n, self.params, seed)
                worst = min(worst, clcd_estimate(v, params).lower)
                shortest = min(shortest, float(np.linalg.norm(difference_vector(v))))
            block[f"difference_norm_n{n}"] = CheckResult(
                shortest, spread, 0.0, shortest - spread, shortest >= spread
            ).to_dict()
            block[f"floor_n{n}"] = CheckResult(
                worst, floor, 0.0, worst - floor, worst >= floor
            ).to_dict()
        hand = clcd_estimate(np.array([0.0, 1.0]), ClcdParams(0.1, 10.0, 4.0, 1e-3))
        upper = hand.upper if math.isfinite(hand.upper) else math.nan
        bracketed = hand.lower - 2e-3 <= HAND_CLCD <= upper + 2e-3
        block["hand_case"] = CheckResult(
            [hand.lower, hand.upper],
            HAND_CLCD,
            2 * hand.resolution,
            upper - HAND_CLCD,
            bool(bracketed),
        ).to_dict()
        return block

    def _dual_block(self) -> Dict[str, Any]:
        count = self._count(200)
        worst = 0.0
        checked = 0
        for matrix in self._matrices("duals", 12, count):
            if is_singular_exact(matrix):
                continue
            pair = biorthogonal_duals(matrix.dense)
            residual = max(pair.dual_norm_residual(), pair.biorthogonality_residual())
            worst = max(worst, residual)
            checked += 1
        return {
            "residual": CheckResult(
                worst,
                None,
                CERTIFICATE_TOLERANCE,
                worst,
                worst < CERTIFICATE_TOLERANCE,
                f"{checked} invertible 12 x 12 matrices",
            ).to_dict()
        }

    def _singularity_block(self) -> Dict[str, Any]:
        block: Dict[str, Any] = {}
        for (n, d), expected in TINY_SINGULAR_RATES.items():
            source = EnumeratedSource(n, n, d)
            flags = []
            disagreements = 0
            for matrix in source:
                singular = is_singular_exact(matrix)
                determinant = round(float(np.linalg.det(matrix.dense)))
                disagreements += int(singular != (determinant == 0))
                flags.append(singular)
            observed = float(np.mean(flags))
            block[f"n{n}_d{d}"] = CheckResult(
                observed,
                expected,
                0.0,
                observed - expected,
                observed == expected and disagreements == 0,
                f"{disagreements} determinant disagreements",
            ).to_dict()
        return block

    def _moments_block(self) -> Dict[str, Any]:
        block: Dict[str, Any] = {}
        for n, d in MOMENT_CASES:
            report = moments_check(n, d, mode="exact")
            compared = (
                report.restricted
                if report.relation == "upper_bound"
                else report.oracle_value
            )
            block[f"x_n{n}_d{d}"] = CheckResult(
                report.formula_value,
                compared,
                1e-10,
                report.abs_diff,
                report.passed,
                report.relation,
            ).to_dict()

        v = np.array([0.5, -1.0, 2.0, 0.25])
        mu, sigma2 = row_inner_moments(v, 4, 2)
        values = rows_dot(support_table(4, 2), v)
        block["row_moments_exact"] = CheckResult(
            [mu, sigma2],
            [float(values.mean()), float(values.var())],
            1e-12,
            max(abs(mu - values.mean()), abs(sigma2 - values.var())),
            abs(mu - values.mean()) <= 1e-12 and abs(sigma2 - values.var()) <= 1e-12,
        ).to_dict()

        trials = self._count(20_000, minimum=100)
        w = self._seed("row-moments-v").rng().standard_normal(50)
        mu, sigma2 = row_inner_moments(w, 50, 25)
        supports = sample_supports_batch(50, 25, trials, self._seed("row-moments"))
        samples = rows_dot(supports, w)
        stderr = math.sqrt(sigma2 / trials)
        gap = abs(float(samples.mean()) - mu)
        block["row_moments_mc"] = CheckResult(
            mu,
            float(samples.mean()),
            SLACK_STDERR * stderr,
            gap,
            gap <= SLACK_STDERR * stderr,
        ).to_dict()

        variance = column_sum_variance(16, 8)
        estimate, stderr = column_sum_variance_mc(
            16, 8, trials, self._seed("column-sum")
        )
        gap = abs(estimate - variance)
        block["column_sum_variance"] = CheckResult(
            variance,
            estimate,
            SLACK_STDERR * stderr,
            gap,
            gap <= SLACK_STDERR * stderr,
        ).to_dict()
        return block
