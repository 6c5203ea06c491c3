from __future__ import annotations

import math

import numpy as np
import pytest

from combilab.errors import ParameterError, SingularityError
from combilab.linalg import (
    biorthogonal_duals,
    centered_opnorm,
    crosscheck_sn,
    dist_to_span,
    restricted_opnorm,
    row_sum_identity_holds,
    spectrum,
)
from combilab.sampling import CombMatrix, SampledSource, SeedSpec


def _identity(n: int) -> CombMatrix:
    return CombMatrix.from_rows(n, [[i] for i in range(n)])


def _j_minus_i() -> CombMatrix:
    return CombMatrix.from_rows(3, [[1, 2], [0, 2], [0, 1]])


def test_identity_permutation_spectrum():
    summary = spectrum(_identity(2))
    assert summary.s1 == pytest.approx(1.0)
    assert summary.sn == pytest.approx(1.0)
    assert summary.kappa == pytest.approx(1.0)
    assert not summary.exactly_singular


def test_all_ones_matrix_is_singular_with_zero_centered_norm():
    summary = spectrum(CombMatrix.from_rows(3, [[0, 1, 2]] * 3))
    assert summary.s1 == pytest.approx(3.0)
    assert summary.sn == 0.0
    assert summary.exactly_singular
    assert math.isinf(summary.kappa)
    assert summary.centered_opnorm == pytest.approx(0.0, abs=1e-12)
    assert summary.to_dict()["kappa"] == "inf"


def test_j_minus_i_spectrum():
    summary = spectrum(_j_minus_i())
    assert summary.s1 == pytest.approx(2.0)
    assert summary.sn == pytest.approx(1.0)
    assert summary.kappa == pytest.approx(2.0)
    assert summary.centered_opnorm == pytest.approx(1.0)


def test_first_columns_block_reaches_hilbert_schmidt_norm():
    n, d = 6, 2
    matrix = CombMatrix.from_rows(n, [list(range(d))] * n)
    assert spectrum(matrix).s1 == pytest.approx(math.sqrt(d * n))


def test_row_sums_force_s1_at_least_d():
    source = SampledSource(12, 12, 5, 30, SeedSpec(3, "s1"))
    for matrix in source:
        summary = spectrum(matrix)
        assert summary.s1 >= 5 - 1e-9
        assert summary.s1 >= summary.sn >= 0.0
        assert row_sum_identity_holds(matrix)


def test_rectangular_input_reports_norms():
    matrix = CombMatrix.from_rows(4, [[0, 1], [2, 3]])
    summary = spectrum(matrix)
    assert summary.s1 == pytest.approx(math.sqrt(2.0))
    assert summary.sn == pytest.approx(math.sqrt(2.0))
    assert not summary.exactly_singular


def test_centered_norm_matches_zero_sum_restriction():
    source = SampledSource(9, 9, 4, 20, SeedSpec(5, "restricted"))
    for matrix in source:
        assert centered_opnorm(matrix) == pytest.approx(
            restricted_opnorm(matrix), rel=1e-8
        )


def test_inverse_iteration_agrees_with_svd():
    source = SampledSource(60, 60, 30, 3, SeedSpec(9, "inverse"))
    for matrix in source:
        summary = spectrum(matrix, "inverse")
        if summary.exactly_singular:
            continue
        assert summary.method == "inverse"
        assert crosscheck_sn(matrix, summary) < 1e-6
        reference = spectrum(matrix, "svd")
        assert summary.s1 == pytest.approx(reference.s1, rel=1e-8)


@pytest.mark.parametrize("rows", [[[0]], [[0], [1]]])
def test_inverse_iteration_falls_back_to_svd_on_tiny_matrices(rows):
    matrix = CombMatrix.from_rows(len(rows), rows)
    summary = spectrum(matrix, "inverse")
    assert summary.method == "svd"
    assert summary.s1 == pytest.approx(1.0)
    assert summary.sn == pytest.approx(1.0)
    assert summary.kappa == pytest.approx(1.0)


def test_dist_to_span_examples():
    e1, e2 = np.eye(2)
    assert dist_to_span(e1, [e2]) == pytest.approx(1.0)
    v = np.array([1.0, 1.0]) / math.sqrt(2.0)
    assert dist_to_span(v, [e1]) == pytest.approx(1 / math.sqrt(2.0))
    assert dist_to_span(e1 + e2, [e1, e2]) == 0.0


def test_dist_to_span_matches_least_squares():
    rng = np.random.default_rng(17)
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        count = int(rng.integers(1, dim))
        W = rng.standard_normal((count, dim))
        v = rng.standard_normal(dim)
        coefficients, *_ = np.linalg.lstsq(W.T, v, rcond=None)
        expected = float(np.linalg.norm(v - W.T @ coefficients))
        assert dist_to_span(v, W) == pytest.approx(expected, abs=1e-9)


def test_dist_to_span_rejects_dimension_mismatch():
    with pytest.raises(ParameterError):
        dist_to_span(np.ones(3), [np.ones(2)])


def test_biorthogonal_duals_hand_example():
    pair = biorthogonal_duals([[1.0, 0.0], [1.0, 1.0]])
    assert np.allclose(pair.F, [[1.0, -1.0], [0.0, 1.0]])
    assert np.linalg.norm(pair.F[0]) == pytest.approx(math.sqrt(2.0))
    assert dist_to_span(pair.E[0], [pair.E[1]]) == pytest.approx(1 / math.sqrt(2.0))
    assert pair.dual_norm_residual() < 1e-12


def test_biorthogonal_duals_of_standard_basis():
    pair = biorthogonal_duals(np.eye(4))
    assert np.allclose(pair.F, np.eye(4))


def test_columns_and_inverse_rows_are_biorthogonal():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    # row k of A.T is A e_k
    pair = biorthogonal_duals(A.T)
    assert np.allclose(pair.F, np.linalg.inv(A))
    assert pair.biorthogonality_residual() < 1e-10
    assert pair.dual_norm_residual() < 1e-8


def test_biorthogonal_duals_rejects_dependent_vectors():
    with pytest.raises(SingularityError):
        biorthogonal_duals([[1.0, 1.0], [2.0, 2.0]])
