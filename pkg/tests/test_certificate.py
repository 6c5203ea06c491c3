from __future__ import annotations

import math

import numpy as np
import pytest

from combilab.errors import ParameterError, SingularityError
from combilab.linalg import (
    decomposition_check,
    ratio_bound,
    spectrum,
    witness_certificate,
)
from combilab.linalg.modular import is_singular_exact
from combilab.sampling import CombMatrix, SampledSource, SeedSpec

J_MINUS_I = CombMatrix.from_rows(3, [[1, 2], [0, 2], [0, 1]])


def test_identity_certificate_is_tight():
    certificate = witness_certificate(CombMatrix.from_rows(3, [[0], [1], [2]]))
    assert certificate.x_norm == pytest.approx(1.0)
    assert certificate.image_norm == pytest.approx(1.0)
    assert certificate.bound == pytest.approx(1.0)


def test_j_minus_i_hand_values():
    certificate = witness_certificate(J_MINUS_I)
    assert certificate.x == pytest.approx(np.array([-2.0, 2.0, 2.0]) / 3.0)
    assert certificate.x_norm == pytest.approx(2.0 / math.sqrt(3.0))
    assert certificate.image_norm == pytest.approx(math.sqrt(11.0) / 3.0)
    assert certificate.bound == pytest.approx(6.0 / math.sqrt(33.0))
    # s_3(J - I) = 1
    assert certificate.bound >= 1.0


def test_ratio_bound_matches_transpose_solve():
    x = np.array([1.0, 0.0, 0.0])
    x_norm, image_norm = ratio_bound(J_MINUS_I, x)
    assert x_norm == pytest.approx(1.0)
    # (J - I)^{-1} = J/2 - I for n = 3
    assert image_norm == pytest.approx(math.sqrt(0.25 + 0.25 + 0.25))


def test_certificate_never_undercuts_the_smallest_singular_value():
    for n in range(2, 9):
        d = max(1, n // 2)
        source = SampledSource(n, n, d, 60, SeedSpec(5, f"cert:{n}"))
        for matrix in source:
            if is_singular_exact(matrix):
                continue
            summary = spectrum(matrix, "svd")
            bound = witness_certificate(matrix).bound
            assert bound >= summary.sn - 1e-8 * summary.s1


def test_singular_and_rectangular_inputs_are_rejected():
    with pytest.raises(SingularityError):
        witness_certificate(CombMatrix.from_rows(2, [[0, 1], [0, 1]]))
    with pytest.raises(SingularityError):
        decomposition_check(CombMatrix.from_rows(3, [[0], [0], [1]]))
    with pytest.raises(ParameterError):
        witness_certificate(CombMatrix.from_rows(3, [[0], [1]]))


def test_decomposition_of_j_minus_i():
    report = decomposition_check(J_MINUS_I)
    assert report.passed
    assert len(report.a) == len(report.b) == 2
    # distance from (1,0,1) to span{(1,1,0)} is sqrt(3/2)
    assert report.b[0] == pytest.approx(math.sqrt(1.5))


def test_decomposition_residuals_on_random_invertible_matrices():
    checked = 0
    for n in (4, 6, 8):
        source = SampledSource(n, n, n // 2, 40, SeedSpec(9, f"decomp:{n}"))
        for matrix in source:
            if is_singular_exact(matrix):
                continue
            report = decomposition_check(matrix)
            assert report.max_residual < 1e-8
            assert all(b > 0 for b in report.b)
            checked += 1
    assert checked > 0


def test_decomposition_report_serializes():
    payload = decomposition_check(J_MINUS_I).to_dict()
    assert payload["passed"] is True
    assert set(payload) == {
        "biorthogonality",
        "dual_norm",
        "image_identity",
        "a",
        "b",
        "passed",
    }
