from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from loguru import logger

from ..config.loader import config_hash
from ..config.schema import ExperimentConfig, GridPoint
from ..errors import FitError, ParameterError, RankError
from ..geometry.almost_constant import AlmostConstParams, sample_almost_constant
from ..linalg.certificate import decomposition_check, witness_certificate
from ..linalg.modular import is_singular_exact
from ..linalg.spectrum import (
    SpectralSummary,
    centered_opnorm,
    crosscheck_sn,
    restricted_opnorm,
    row_sum_identity_holds,
    spectrum,
)
from ..linalg.subspace import project_onto_span
from ..sampling.base import CombMatrix, MatrixSource
from ..sampling.loaders import build_source
from ..sampling.seeds import SeedSpec
from .engine import TrialEngine, resolve_workers
from .metrics import fit_loglog, rate, summarize
from .results import FitResult, StudyResult, TableBuilder

Record = dict[str, float]
TrialFn = Callable[[GridPoint, CombMatrix, int], Record]

CERTIFICATE_SLACK = 1e-8
RECONSTRUCTION_NOTE = (
    "grid ranges and trial counts for the figure regimes are reconstructions"
)


@dataclass
class PointRun:
    """All per-trial records of one grid point, in trial order."""

    index: int
    point: GridPoint
    records: list[Record]
    exact: bool

    @property
    def count(self) -> int:
        return len(self.records)

    def column(self, key: str) -> np.ndarray:
        return np.array(
            [record.get(key, math.nan) for record in self.records], dtype=np.float64
        )

    def has(self, key: str) -> bool:
        return any(key in record for record in self.records)

    def mean(self, key: str) -> float:
        values = self.column(key)
        values = values[~np.isnan(values)]
        return float(values.mean()) if values.size else math.nan

    def total(self, key: str) -> float:
        return float(np.nansum(self.column(key)))

    def largest(self, key: str) -> float:
        return float(np.nanmax(self.column(key)))


class _Table:
    """Turns per-trial columns into (point, stat) rows; NaN entries are skipped."""

    def __init__(self) -> None:
        self.builder = TableBuilder()

    def _add(
        self, run: PointRun, stat: str, values: tuple[float, float, float]
    ) -> None:
        point = run.point
        self.builder.add(
            run.index, point.rows, point.n, point.d, run.count, stat, *values
        )

    def summary(self, run: PointRun, stat: str, values: np.ndarray) -> None:
        finite = values[~np.isnan(values)]
        if finite.size:
            self._add(run, stat, summarize(finite, run.exact))

    def rate(self, run: PointRun, stat: str, flags: np.ndarray) -> None:
        finite = flags[~np.isnan(flags)]
        if finite.size:
            self._add(run, stat, rate(finite, run.exact))

    def below(
        self, run: PointRun, stat: str, values: np.ndarray, level: float
    ) -> None:
        finite = values[~np.isnan(values)]
        if finite.size:
            self._add(run, stat, rate(finite <= level, run.exact))

    def scalar(self, run: PointRun, stat: str, value: float) -> None:
        self._add(run, stat, (value, value, 0.0))

    def frame(self) -> pd.DataFrame:
        return self.builder.frame()


def _trial(
    trial_fn: TrialFn, point: GridPoint, source: MatrixSource, trial: int
) -> Record:
    return trial_fn(point, source.draw(trial), trial)


def _run_points(
    cfg: ExperimentConfig,
    study: str,
    trial_for: Callable[[int], TrialFn],
    engine: TrialEngine,
    prefer_exact: bool = False,
) -> list[PointRun]:
    runs = []
    for index, point in enumerate(cfg.grid):
        source = build_source(cfg, point, study, index, prefer_exact)
        logger.debug(
            "{} point {} ({}): {} {}",
            study,
            index,
            point.label(),
            len(source),
            "matrices" if source.exact else "trials",
        )
        task = partial(_trial, trial_for(index), point, source)
        runs.append(PointRun(index, point, engine.map(task, len(source)), source.exact))
    logger.info("{}: {} grid points done", study, len(runs))
    return runs


def _same_trial(trial_fn: TrialFn) -> Callable[[int], TrialFn]:
    return lambda index: trial_fn


def _engine(cfg: ExperimentConfig, engine: Optional[TrialEngine]) -> TrialEngine:
    return engine if engine is not None else TrialEngine(resolve_workers(None, cfg))


def _metadata(
    cfg: ExperimentConfig, study: str, runs: list[PointRun]
) -> dict[str, Any]:
    return {
        "study": study,
        "seed": cfg.seed,
        "config_hash": config_hash(cfg),
        "trials": cfg.trials,
        "exact_points": [run.index for run in runs if run.exact],
        "notes": [RECONSTRUCTION_NOTE],
    }


def _stride(rate_value: float) -> int:
    return 0 if rate_value <= 0 else max(1, int(round(1.0 / rate_value)))


def _certificate_violated(matrix: CombMatrix, summary: SpectralSummary) -> bool:
    certificate = witness_certificate(matrix)
    return certificate.bound < summary.sn - CERTIFICATE_SLACK * summary.s1


def spectral_trial(cfg: ExperimentConfig) -> TrialFn:
    """Default trial: spectrum plus the sampled certificate and SVD cross-checks."""
    certificate_every = _stride(cfg.certificate_check_rate)
    crosscheck_every = _stride(cfg.crosscheck_rate)

    def run(point: GridPoint, matrix: CombMatrix, trial: int) -> Record:
        summary = spectrum(matrix, cfg.spectrum_method)
        record: Record = {
            "sn": summary.sn,
            "s1": summary.s1,
            "kappa": summary.kappa,
            "singular": float(summary.exactly_singular),
            "zero_column": float(matrix.has_zero_column()),
            "s1_below_d": float(summary.s1 < matrix.d * (1.0 - 1e-9)),
        }
        if (
            certificate_every
            and trial % certificate_every == 0
            and matrix.is_square
            and not summary.exactly_singular
        ):
            violated = _certificate_violated(matrix, summary)
            record["certificate_violation"] = float(violated)
        if (
            summary.method == "inverse"
            and crosscheck_every
            and trial % crosscheck_every == 0
        ):
            record["crosscheck_gap"] = crosscheck_sn(matrix, summary)
        return record

    return run


def _check_square(cfg: ExperimentConfig, study: str) -> None:
    for index, point in enumerate(cfg.grid):
        if point.rows != point.n:
            raise ParameterError(f"{study} needs square matrices; grid[{index}].m")


def _piggyback_rows(table: _Table, run: PointRun) -> None:
    if run.has("certificate_violation"):
        checked = np.count_nonzero(~np.isnan(run.column("certificate_violation")))
        table.scalar(run, "certificate_checked", float(checked))
        table.scalar(run, "certificate_violations", run.total("certificate_violation"))
    if run.has("crosscheck_gap"):
        table.scalar(run, "crosscheck_max_gap", run.largest("crosscheck_gap"))


def _fit_points(
    runs: list[PointRun],
    x_of: Callable[[GridPoint], float],
    y_of: Callable[[PointRun], float],
    label: str,
) -> tuple[Optional[FitResult], Optional[str]]:
    points = []
    for run in runs:
        y = y_of(run)
        if not (y > 0 and math.isfinite(y)):
            logger.warning(
                "{}: excluding point {} from the fit (value {})", label, run.index, y
            )
            continue
        points.append((x_of(run.point), y))
    try:
        fit = fit_loglog(points)
    except FitError as exc:
        logger.warning("{}: {}", label, exc)
        return None, str(exc)
    logger.info(
        "{} fit: slope={:.4f} intercept={:.4f} r2={:.4f}",
        label,
        fit.slope,
        fit.intercept,
        fit.r_squared,
    )
    return fit, None


def sqrt_d_over_n(point: GridPoint) -> float:
    return math.sqrt(point.d) / point.n


def run_scaling_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Mean s_n per grid point, fitted against sqrt(d)/n on log-log axes.

    Singular draws contribute s_n = 0 to the mean and are also counted in
    ``singular_rate``.
    """
    _check_square(cfg, "scaling-study")
    trial = _same_trial(trial_fn or spectral_trial(cfg))
    runs = _run_points(cfg, "scaling", trial, _engine(cfg, engine))
    table = _Table()
    for run in runs:
        reference = sqrt_d_over_n(run.point)
        table.summary(run, "sn", run.column("sn"))
        table.summary(run, "s1", run.column("s1"))
        table.rate(run, "singular_rate", run.column("singular"))
        table.scalar(run, "sqrt_d_over_n", reference)
        table.scalar(run, "sn_scaled", run.mean("sn") / reference)
        _piggyback_rows(table, run)
    fit, error = _fit_points(
        runs, sqrt_d_over_n, lambda run: run.mean("sn"), "scaling"
    )
    return StudyResult(
        study="scaling",
        table=table.frame(),
        metadata=_metadata(cfg, "scaling", runs),
        fit=fit,
        fit_error=error,
        headline="sn",
        reference="sqrt_d_over_n",
    )


def tail_thresholds(point: GridPoint, eps: float) -> tuple[float, float]:
    """(sqrt(d) / (eps^2 n), eps / sqrt(n)): upper-tail and lower-tail levels."""
    return math.sqrt(point.d) / (eps**2 * point.n), eps / math.sqrt(point.n)


def run_tail_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Empirical P(s_n <= sqrt(d)/(eps^2 n)) and P(s_n <= eps/sqrt(n)) per eps."""
    _check_square(cfg, "tail-study")
    trial = _same_trial(trial_fn or spectral_trial(cfg))
    runs = _run_points(cfg, "tail", trial, _engine(cfg, engine))
    table = _Table()
    for run in runs:
        sn = run.column("sn")
        table.summary(run, "sn", sn)
        table.rate(run, "singular_rate", run.column("singular"))
        for eps in cfg.epsilons:
            upper, lower = tail_thresholds(run.point, eps)
            table.below(run, f"p_upper_eps{eps:g}", sn, upper)
            table.below(run, f"p_lower_eps{eps:g}", sn, lower)
        _piggyback_rows(table, run)
    return StudyResult(
        study="tail",
        table=table.frame(),
        metadata=_metadata(cfg, "tail", runs),
        headline="sn",
        reference="sqrt_d_over_n",
    )


def run_condition_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Median condition number over invertible draws, fitted against n."""
    _check_square(cfg, "condition-study")
    trial = _same_trial(trial_fn or spectral_trial(cfg))
    runs = _run_points(cfg, "condition", trial, _engine(cfg, engine))
    table = _Table()
    medians: dict[int, float] = {}
    for run in runs:
        kappa = run.column("kappa")
        invertible = kappa[np.isfinite(kappa)]
        table.rate(run, "invertible_fraction", np.isfinite(kappa).astype(float))
        if run.has("s1_below_d"):
            table.scalar(run, "s1_below_d_count", run.total("s1_below_d"))
        _piggyback_rows(table, run)
        if invertible.size == 0:
            logger.warning(
                "condition: every draw at point {} is singular; excluded", run.index
            )
            continue
        table.summary(run, "kappa", invertible)
        medians[run.index] = float(np.median(invertible))
    fit, error = _fit_points(
        [run for run in runs if run.index in medians],
        lambda point: float(point.n),
        lambda run: medians[run.index],
        "condition",
    )
    return StudyResult(
        study="condition",
        table=table.frame(),
        metadata=_metadata(cfg, "condition", runs),
        fit=fit,
        fit_error=error,
        headline="kappa",
    )


def opnorm_trial(point: GridPoint, matrix: CombMatrix, trial: int) -> Record:
    norm = centered_opnorm(matrix)
    restricted = restricted_opnorm(matrix)
    return {
        "ratio": norm / math.sqrt(point.d),
        "identity_residual": abs(norm - restricted) / max(1.0, norm),
        "row_sum_failure": float(not row_sum_identity_holds(matrix)),
    }


def run_opnorm_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Distribution of ||M - EM|| / sqrt(pn) and its exceedance rate at each t."""
    trial = _same_trial(trial_fn or opnorm_trial)
    runs = _run_points(cfg, "opnorm", trial, _engine(cfg, engine))
    table = _Table()
    for run in runs:
        ratio = run.column("ratio")
        table.summary(run, "ratio", ratio)
        table.scalar(run, "ratio_max", float(np.max(ratio)))
        table.scalar(run, "ratio_q90", float(np.quantile(ratio, 0.9)))
        table.scalar(run, "ratio_q99", float(np.quantile(ratio, 0.99)))
        for t in cfg.opnorm_t:
            table.rate(run, f"exceed_t{t:g}", (ratio >= t).astype(float))
        if run.has("identity_residual"):
            table.scalar(
                run, "identity_residual_max", run.largest("identity_residual")
            )
        if run.has("row_sum_failure"):
            table.scalar(run, "row_sum_failures", run.total("row_sum_failure"))
    return StudyResult(
        study="opnorm",
        table=table.frame(),
        metadata=_metadata(cfg, "opnorm", runs),
        headline="ratio",
    )


def singularity_trial(point: GridPoint, matrix: CombMatrix, trial: int) -> Record:
    return {
        "singular": float(is_singular_exact(matrix)),
        "zero_column": float(matrix.has_zero_column()),
    }


def run_singularity_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Exact-singularity and zero-column rates; enumerates when the point fits."""
    _check_square(cfg, "singularity-study")
    runs = _run_points(
        cfg,
        "singularity",
        _same_trial(trial_fn or singularity_trial),
        _engine(cfg, engine),
        prefer_exact=True,
    )
    table = _Table()
    for run in runs:
        table.rate(run, "singular_rate", run.column("singular"))
        table.rate(run, "zero_column_rate", run.column("zero_column"))
    return StudyResult(
        study="singularity",
        table=table.frame(),
        metadata=_metadata(cfg, "singularity", runs),
        headline="singular_rate",
    )


def cons_trial(cfg: ExperimentConfig, index: int) -> TrialFn:
    """Min of ||Mv|| / sqrt(pn) over ``cfg.cons_vectors`` almost-constant v."""
    params = AlmostConstParams(cfg.almost_constant.delta, cfg.almost_constant.rho)
    vectors = SeedSpec(master_seed=cfg.seed, experiment=f"cons-vectors:{index}")

    def run(point: GridPoint, matrix: CombMatrix, trial: int) -> Record:
        rng = vectors.with_trial(trial).rng()
        scale = math.sqrt(point.d)
        ratios = []
        for _ in range(cfg.cons_vectors):
            v = sample_almost_constant(point.n, params, rng)
            ratios.append(float(np.linalg.norm(matrix.dense @ v)) / scale)
        flat = np.full(point.n, 1.0 / math.sqrt(point.n))
        return {
            "min_ratio": min(ratios),
            "flat_ratio": float(np.linalg.norm(matrix.dense @ flat)) / scale,
        }

    return run


def run_cons_invertibility_study(
    cfg: ExperimentConfig, engine: Optional[TrialEngine] = None
) -> StudyResult:
    """Lower envelope of ||Mv|| / sqrt(pn) over sampled almost-constant unit v."""
    for index, point in enumerate(cfg.grid):
        if 2 * point.rows < point.n:
            raise ParameterError(f"cons-study needs n/2 <= m <= n; grid[{index}].m")
    runs = _run_points(cfg, "cons", partial(cons_trial, cfg), _engine(cfg, engine))
    table = _Table()
    for run in runs:
        minima = run.column("min_ratio")
        table.summary(run, "min_ratio", minima)
        table.scalar(run, "envelope", float(np.min(minima)))
        table.summary(run, "flat_ratio", run.column("flat_ratio"))
    envelope = min(float(np.min(run.column("min_ratio"))) for run in runs)
    logger.info("cons: lower envelope over the grid {:.6g}", envelope)
    metadata = _metadata(cfg, "cons", runs)
    metadata["envelope"] = envelope
    return StudyResult(
        study="cons",
        table=table.frame(),
        metadata=metadata,
        headline="min_ratio",
    )


def certificate_trial(cfg: ExperimentConfig) -> TrialFn:
    def run(point: GridPoint, matrix: CombMatrix, trial: int) -> Record:
        summary = spectrum(matrix, cfg.spectrum_method)
        rows = matrix.dense
        record: Record = {"singular": float(summary.exactly_singular)}
        if point.n >= 3:
            _, b2_residual, _ = project_onto_span(rows[1], rows[2:])
            record["b2"] = float(np.linalg.norm(b2_residual))
        if summary.exactly_singular:
            return record
        certificate = witness_certificate(matrix)
        record.update(
            {
                "bound_ratio": certificate.bound / summary.sn,
                "x_norm": certificate.x_norm,
                "x_norm_sq": certificate.x_norm**2,
                "image_over_sqrt_n": certificate.image_norm / math.sqrt(point.n),
                "violation": float(
                    certificate.bound < summary.sn - CERTIFICATE_SLACK * summary.s1
                ),
            }
        )
        if 2 <= point.n <= cfg.decomposition_max_n:
            try:
                report = decomposition_check(matrix)
            except RankError:
                record["decomposition_skipped"] = 1.0
            else:
                record["decomposition_residual"] = report.max_residual
        return record

    return run


def run_certificate_study(
    cfg: ExperimentConfig, engine: Optional[TrialEngine] = None
) -> StudyResult:
    """Witness bound against s_n, residual norms and their Chebyshev tails."""
    _check_square(cfg, "certificate-study")
    trial = _same_trial(certificate_trial(cfg))
    runs = _run_points(cfg, "certificate", trial, _engine(cfg, engine))
    table = _Table()
    for run in runs:
        n, d = run.point.n, run.point.d
        table.rate(run, "singular_rate", run.column("singular"))
        table.summary(run, "bound_ratio", run.column("bound_ratio"))
        table.summary(run, "x_norm_sq", run.column("x_norm_sq"))
        table.summary(run, "image_over_sqrt_n", run.column("image_over_sqrt_n"))
        table.scalar(run, "violations", run.total("violation"))
        x_norm = run.column("x_norm")
        for u in (1.0, 2.0):
            flags = np.where(np.isnan(x_norm), np.nan, (x_norm >= u).astype(float))
            table.rate(run, f"x_tail_u{u:g}", flags)
            table.scalar(run, f"x_tail_bound_u{u:g}", 3.0 * d / (u**2 * n))
        if run.has("b2"):
            b2 = run.column("b2")
            for t in (1.0, 2.0):
                level = t * math.sqrt(3.0 * d / n)
                table.rate(run, f"b2_tail_t{t:g}", (b2 >= level).astype(float))
                table.scalar(run, f"b2_tail_bound_t{t:g}", 1.0 / t**2)
        if run.has("decomposition_residual"):
            table.scalar(
                run, "decomposition_max_residual", run.largest("decomposition_residual")
            )
        if run.has("decomposition_skipped"):
            table.scalar(
                run, "decomposition_skipped", run.total("decomposition_skipped")
            )
    return StudyResult(
        study="certificate",
        table=table.frame(),
        metadata=_metadata(cfg, "certificate", runs),
        headline="bound_ratio",
    )


def sparse_regime(n: int, d: int, margin: float) -> bool:
    """min(d, n - d) >= (1 + margin) log n."""
    return min(d, n - d) >= (1.0 + margin) * math.log(n)


def run_sparse_study(
    cfg: ExperimentConfig,
    engine: Optional[TrialEngine] = None,
    trial_fn: Optional[TrialFn] = None,
) -> StudyResult:
    """Sparse-regime evidence: P(s_n > C sqrt(d)/n), zero columns, log-log fit."""
    _check_square(cfg, "sparse-study")
    trial = _same_trial(trial_fn or spectral_trial(cfg))
    runs = _run_points(cfg, "sparse", trial, _engine(cfg, engine))
    table = _Table()
    for run in runs:
        sn = run.column("sn")
        level = cfg.sparse_constant * sqrt_d_over_n(run.point)
        table.summary(run, "sn", sn)
        table.rate(run, "p_sn_above_level", (sn > level).astype(float))
        table.rate(run, "singular_rate", run.column("singular"))
        table.rate(run, "zero_column_rate", run.column("zero_column"))
        table.scalar(run, "sqrt_d_over_n", sqrt_d_over_n(run.point))
    fit, error = _fit_points(
        runs, sqrt_d_over_n, lambda run: run.mean("sn"), "sparse"
    )
    metadata = _metadata(cfg, "sparse", runs)
    metadata["regime"] = [
        {
            "point": run.index,
            "n": run.point.n,
            "d": run.point.d,
            "in_regime": sparse_regime(run.point.n, run.point.d, cfg.sparse_margin),
        }
        for run in runs
    ]
    return StudyResult(
        study="sparse",
        table=table.frame(),
        metadata=metadata,
        fit=fit,
        fit_error=error,
        headline="sn",
        reference="sqrt_d_over_n",
    )


STUDIES: dict[str, Callable[..., StudyResult]] = {
    "scaling": run_scaling_study,
    "tail": run_tail_study,
    "condition": run_condition_study,
    "opnorm": run_opnorm_study,
    "singularity": run_singularity_study,
    "cons": run_cons_invertibility_study,
    "certificate": run_certificate_study,
    "sparse": run_sparse_study,
}
