from __future__ import annotations

import math

import numpy as np
import pandas as pd
import pytest

from combilab.config import ExperimentConfig, GridPoint, config_hash, load_preset
from combilab.errors import FitError, ParameterError
from combilab.experiments import (
    TrialEngine,
    fit_loglog,
    run_certificate_study,
    run_condition_study,
    run_cons_invertibility_study,
    run_opnorm_study,
    run_scaling_study,
    run_singularity_study,
    run_sparse_study,
    run_tail_study,
    sparse_regime,
    sqrt_d_over_n,
    summarize,
    tail_thresholds,
)
from combilab.experiments.studies import cons_trial
from combilab.sampling import SeedSpec, sample_matrix


def _fixed(n: int, k: int, m: int | None = None) -> GridPoint:
    return GridPoint(n=n, m=m, d_rule="fixed", k=k)


def _config(*points: GridPoint, **fields) -> ExperimentConfig:
    return ExperimentConfig(grid=list(points), **fields)


def _reference_trial(point, matrix, trial):
    return {"sn": math.sqrt(point.d) / point.n}


def test_injected_trial_recovers_unit_slope():
    cfg = _config(_fixed(8, 2), _fixed(16, 2), _fixed(32, 2), trials=3)
    result = run_scaling_study(cfg, trial_fn=_reference_trial)
    fit = result.require_fit()
    assert fit.slope == pytest.approx(1.0)
    assert fit.intercept == pytest.approx(0.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert result.value(1, "sn_scaled") == pytest.approx(1.0)
    assert result.metadata["config_hash"] == config_hash(cfg)


def test_single_grid_point_reports_fit_error():
    cfg = _config(_fixed(8, 2), trials=3)
    result = run_scaling_study(cfg, trial_fn=_reference_trial)
    assert result.fit is None
    assert "two distinct" in result.fit_error
    with pytest.raises(FitError):
        result.require_fit()


def test_exact_singularity_rates_on_tiny_models():
    result = run_singularity_study(load_preset("tiny_exact"))
    assert result.column("singular_rate") == pytest.approx([0.5, 7.0 / 9.0, 7.0 / 9.0])
    assert result.value(0, "zero_column_rate") == 0.5
    assert result.column("singular_rate", "stderr") == pytest.approx([0.0] * 3)
    assert result.metadata["exact_points"] == [0, 1, 2]


def test_singularity_study_prefers_enumeration_within_budget():
    cfg = _config(_fixed(3, 2), _fixed(10, 5), trials=40, exact_budget=1000)
    result = run_singularity_study(cfg)
    assert result.metadata["exact_points"] == [0]
    assert result.value(0, "singular_rate") == pytest.approx(7.0 / 9.0)
    assert result.stat_frame("singular_rate")["trials"].tolist() == [27, 40]


def test_condition_number_of_invertible_three_by_three():
    cfg = _config(_fixed(3, 2), exact=True)
    result = run_condition_study(cfg)
    assert result.value(0, "invertible_fraction") == pytest.approx(6.0 / 27.0)
    assert result.value(0, "kappa") == pytest.approx(2.0)
    assert result.value(0, "kappa", "median") == pytest.approx(2.0)
    assert result.fit is None and result.fit_error


def test_condition_study_excludes_all_singular_points():
    cfg = _config(_fixed(3, 3), _fixed(3, 2), exact=True)
    result = run_condition_study(cfg)
    assert result.value(0, "invertible_fraction") == 0.0
    with pytest.raises(KeyError):
        result.value(0, "kappa")
    assert result.value(1, "kappa") == pytest.approx(2.0)


def test_opnorm_ratio_is_one_for_two_by_two_rows():
    cfg = _config(_fixed(2, 1), exact=True, opnorm_t=[1.0, 2.0])
    result = run_opnorm_study(cfg)
    assert result.value(0, "ratio") == pytest.approx(1.0)
    assert result.value(0, "ratio_max") == pytest.approx(1.0)
    assert result.value(0, "exceed_t2") == 0.0
    assert result.value(0, "row_sum_failures") == 0.0
    assert result.value(0, "identity_residual_max") < 1e-10


def test_tail_probabilities_at_two_by_two():
    cfg = _config(_fixed(2, 1), exact=True, epsilons=[1.0])
    result = run_tail_study(cfg)
    assert tail_thresholds(cfg.grid[0], 1.0) == pytest.approx((0.5, 1 / math.sqrt(2)))
    assert result.value(0, "p_upper_eps1") == pytest.approx(0.5)
    assert result.value(0, "p_lower_eps1") == pytest.approx(0.5)
    assert result.value(0, "singular_rate") == pytest.approx(0.5)


def test_tail_probabilities_grow_with_the_threshold():
    epsilons = [0.25, 0.5, 1.0, 2.0]
    cfg = _config(_fixed(6, 3), trials=60, seed=5, epsilons=epsilons)
    result = run_tail_study(cfg)
    pairs = []
    for eps in epsilons:
        upper, lower = tail_thresholds(cfg.grid[0], eps)
        pairs.append((upper, result.value(0, f"p_upper_eps{eps:g}")))
        pairs.append((lower, result.value(0, f"p_lower_eps{eps:g}")))
    probabilities = [probability for _, probability in sorted(pairs)]
    assert probabilities == sorted(probabilities)


def test_results_do_not_depend_on_worker_count():
    cfg = _config(
        GridPoint(n=6, d_rule="pn", p=0.5),
        GridPoint(n=10, d_rule="pn", p=0.5),
        trials=20,
        seed=11,
    )
    serial = run_scaling_study(cfg, engine=TrialEngine(1))
    threaded = run_scaling_study(cfg, engine=TrialEngine(4))
    pd.testing.assert_frame_equal(serial.table, threaded.table)
    assert config_hash(cfg) == config_hash(cfg.model_copy(update={"workers": 4}))


def test_studies_reject_rectangular_grids():
    cfg = _config(_fixed(6, 3, m=4), trials=5)
    with pytest.raises(ParameterError):
        run_scaling_study(cfg)
    with pytest.raises(ParameterError):
        run_cons_invertibility_study(_config(_fixed(8, 4, m=3), trials=5))


def test_cons_envelope_on_rectangular_matrices():
    cfg = _config(_fixed(8, 4, m=6), _fixed(8, 4), trials=10, cons_vectors=3)
    result = run_cons_invertibility_study(cfg)
    envelope = result.metadata["envelope"]
    assert envelope == pytest.approx(min(result.column("envelope")))
    assert envelope > 0
    assert all(result.column("min_ratio") >= envelope - 1e-12)
    # the flat direction maps to sqrt(m) d / sqrt(n); divided by sqrt(pn) = sqrt(d)
    # that is sqrt(md / n): sqrt(3) for m = 6 and 2 for the square point
    assert result.column("flat_ratio") == pytest.approx([math.sqrt(3.0), 2.0])


def test_cons_trial_normalizes_by_sqrt_pn():
    cfg = _config(_fixed(8, 4, m=6), trials=1, cons_vectors=2)
    matrix = sample_matrix(6, 8, 4, SeedSpec(1, "cons-rect"))
    record = cons_trial(cfg, 0)(cfg.grid[0], matrix, 0)
    assert record["flat_ratio"] == pytest.approx(math.sqrt(3.0))
    assert 0 < record["min_ratio"]


def test_certificate_study_has_no_violations():
    cfg = _config(_fixed(6, 3), _fixed(8, 4), trials=30, seed=3)
    result = run_certificate_study(cfg)
    assert result.column("violations") == pytest.approx([0.0, 0.0])
    assert all(result.column("bound_ratio") >= 1.0 - 1e-8)
    assert all(result.column("decomposition_max_residual") < 1e-8)
    assert result.value(0, "x_tail_bound_u1") == pytest.approx(1.5)
    assert result.value(1, "b2_tail_bound_t2") == pytest.approx(0.25)


def test_sparse_study_records_regime_and_fit():
    cfg = _config(
        GridPoint(n=20, d_rule="pn", p=0.5),
        GridPoint(n=40, d_rule="pn", p=0.5),
        trials=10,
    )
    result = run_sparse_study(cfg)
    regime = result.metadata["regime"]
    assert [entry["in_regime"] for entry in regime] == [True, True]
    assert result.fit is not None
    assert result.value(0, "sqrt_d_over_n") == pytest.approx(sqrt_d_over_n(cfg.grid[0]))
    assert sparse_regime(100, 2, 0.1) is False
    assert sparse_regime(100, 50, 0.1) is True


def test_spectral_trial_runs_certificate_checks():
    cfg = _config(_fixed(6, 3), trials=10, certificate_check_rate=1.0)
    result = run_scaling_study(cfg)
    checked = result.value(0, "certificate_checked")
    singular = result.value(0, "singular_rate") * 10
    assert checked == pytest.approx(10 - singular)
    assert result.value(0, "certificate_violations") == 0.0


def test_metric_helpers():
    assert summarize([1.0, 2.0, 3.0], exact=True) == (2.0, 2.0, 0.0)
    mean, median, stderr = summarize(np.array([1.0, 3.0]))
    assert (mean, median) == (2.0, 2.0)
    assert stderr == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        fit_loglog([(1.0, 0.0), (2.0, 1.0)])
