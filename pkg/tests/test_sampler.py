from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from combilab.errors import CapacityError, ParameterError
from combilab.sampling import (
    CombMatrix,
    EnumeratedSource,
    SampledSource,
    SeedSpec,
    enumerate_matrices,
    enumerate_rows,
    sample_matrix,
    sample_row,
    sample_supports_batch,
)


def _spec(label: str, trial: int = 0) -> SeedSpec:
    return SeedSpec(master_seed=2024, experiment=label, trial=trial)


def test_sample_row_full_support_is_forced():
    assert sample_row(4, 4, 123).support == (0, 1, 2, 3)


def test_sample_row_is_deterministic_and_sorted():
    first = sample_row(10, 4, _spec("row"))
    second = sample_row(10, 4, _spec("row"))
    assert first == second
    assert list(first.support) == sorted(first.support)
    assert first.to_dense().sum() == 4


@pytest.mark.parametrize("n, d", [(4, 0), (4, 5), (0, 1)])
def test_sample_row_rejects_bad_dimensions(n, d):
    with pytest.raises(ParameterError):
        sample_row(n, d, 0)


def test_sample_row_chi_square_uniformity():
    rng = np.random.default_rng(7)
    counts = Counter(sample_row(4, 2, rng).support for _ in range(60_000))
    assert len(counts) == 6
    observed = np.array([counts[key] for key in sorted(counts)])
    _, p_value = stats.chisquare(observed)
    assert p_value > 0.001


def test_sample_matrix_all_ones_when_d_equals_n():
    matrix = sample_matrix(3, 3, 3, _spec("ones"))
    assert np.array_equal(matrix.dense, np.ones((3, 3)))


def test_sample_matrix_is_a_pure_function_of_seed_spec():
    a = sample_matrix(6, 8, 3, _spec("pure", trial=5))
    b = sample_matrix(6, 8, 3, _spec("pure", trial=5))
    c = sample_matrix(6, 8, 3, _spec("pure", trial=6))
    assert a == b
    assert a != c
    assert np.array_equal(a.row_sums(), np.full(6, 3))
    assert np.array_equal(a.dense.sum(axis=1), np.full(6, 3.0))


def test_sample_matrix_two_by_two_frequencies():
    source = SampledSource(2, 2, 1, 4000, _spec("freq"))
    counts = Counter(tuple(source.draw(i).supports.ravel()) for i in range(4000))
    assert len(counts) == 4
    for count in counts.values():
        assert count / 4000 == pytest.approx(0.25, abs=0.02)


def test_entry_mean_and_covariance_match_the_model():
    n, d, trials = 10, 3, 40_000
    p = d / n
    supports = sample_supports_batch(n, d, trials, 11)
    rows = np.zeros((trials, n))
    np.put_along_axis(rows, supports, 1.0, axis=1)
    mean = rows[:, 0].mean()
    assert abs(mean - p) <= 3 * math.sqrt(p * (1 - p) / trials) + 1e-12
    products = (rows[:, 0] - p) * (rows[:, 1] - p)
    target = -p * (1 - p) / (n - 1)
    stderr = products.std(ddof=1) / math.sqrt(trials)
    assert abs(products.mean() - target) <= 3 * stderr + 1e-4


def test_batch_rows_have_d_distinct_sorted_entries():
    supports = sample_supports_batch(12, 5, 500, 3)
    assert supports.shape == (500, 5)
    assert (np.diff(supports, axis=1) > 0).all()
    assert supports.min() >= 0 and supports.max() < 12


def test_enumerate_rows_counts_and_order():
    rows = enumerate_rows(4, 2)
    assert len(rows) == 6
    supports = [row.support for row in rows]
    assert supports == sorted(set(supports))
    assert [row.support for row in enumerate_rows(3, 3)] == [(0, 1, 2)]
    assert [row.support for row in enumerate_rows(2, 1)] == [(0,), (1,)]


@pytest.mark.parametrize(
    "m, n, d, expected", [(2, 2, 1, 4), (3, 3, 2, 27), (1, 3, 1, 3)]
)
def test_enumerate_matrices_yields_each_matrix_once(m, n, d, expected):
    matrices = list(enumerate_matrices(m, n, d))
    assert len(matrices) == expected
    assert len(set(matrices)) == expected


def test_enumerated_source_weights_and_order():
    source = EnumeratedSource(2, 3, 1)
    assert source.exact
    assert len(source) == 9
    assert source.weight(0) == pytest.approx(1 / 9)
    assert source.digits(5) == [1, 2]
    assert source.draw(5) == CombMatrix.from_rows(3, [[1], [2]])


def test_enumeration_budget_raises_capacity_error():
    with pytest.raises(CapacityError):
        EnumeratedSource(8, 8, 4)
    with pytest.raises(CapacityError):
        list(enumerate_matrices(3, 3, 1, budget=10))


def test_seed_spec_streams_are_distinct():
    base = SeedSpec(master_seed=1, experiment="x")
    seeds = {
        base.with_trial(trial).with_row(row).derive()
        for trial in range(20)
        for row in range(20)
    }
    assert len(seeds) == 400
    assert SeedSpec(1, "x").derive() != SeedSpec(1, "y").derive()


def test_comb_matrix_validation_and_columns():
    with pytest.raises(ParameterError):
        CombMatrix.from_rows(3, [[0, 1], [2]])
    with pytest.raises(ParameterError):
        CombMatrix.from_dense([[2, 0], [0, 1]])
    matrix = CombMatrix.from_rows(3, [[0], [0], [1]])
    assert matrix.has_zero_column()
    assert matrix.has_duplicate_rows()
    assert matrix.to_text() == "100\n100\n010"
    assert list(matrix.column_sums()) == [2, 1, 0]
