from __future__ import annotations

import math

import numpy as np
import pytest

from combilab.errors import CapacityError, ParameterError
from combilab.geometry import (
    AlmostConstParams,
    ClcdParams,
    clcd_condition,
    clcd_estimate,
    difference_vector,
    lattice_distance,
    sample_non_almost_constant,
)
from combilab.geometry import clcd as clcd_module

HAND_PARAMS = ClcdParams(gamma=0.1, alpha=10.0, theta_max=4.0, grid_step=1e-3)


def test_difference_vector_order_and_length():
    assert difference_vector(np.array([1.0, 2.0, 4.0])) == pytest.approx(
        [-1.0, -3.0, -2.0]
    )
    assert difference_vector(np.arange(10.0)).size == 45
    with pytest.raises(ParameterError):
        difference_vector(np.array([1.0]))


def test_difference_vector_budget(monkeypatch):
    monkeypatch.setattr(clcd_module, "DIFFERENCE_BUDGET", 5)
    with pytest.raises(CapacityError):
        difference_vector(np.arange(4.0))


def test_lattice_distance_rounds_each_coordinate():
    assert float(lattice_distance(np.array([0.2, 1.9]))) == pytest.approx(
        math.sqrt(0.05)
    )
    assert float(lattice_distance(np.array([3.0, -2.0]))) == 0.0


def test_two_point_vector_brackets_ten_elevenths():
    estimate = clcd_estimate(np.array([0.0, 1.0]), HAND_PARAMS)
    assert estimate.lower <= 10.0 / 11.0 <= estimate.upper
    assert estimate.upper - estimate.lower <= 2 * HAND_PARAMS.grid_step
    assert estimate.witness_theta == estimate.upper
    assert clcd_condition(estimate.upper, np.array([-1.0]), 0.1, 10.0)
    assert not clcd_condition(0.9, np.array([-1.0]), 0.1, 10.0)


def test_constant_vector_has_infinite_clcd():
    estimate = clcd_estimate(np.full(5, 1.0 / math.sqrt(5)), HAND_PARAMS)
    assert math.isinf(estimate.lower) and math.isinf(estimate.upper)
    assert estimate.to_dict()["upper"] == "inf"


def test_fully_cleared_scan_reports_theta_max_as_lower_bound():
    params = ClcdParams(gamma=0.1, alpha=10.0, theta_max=0.8, grid_step=1e-3)
    estimate = clcd_estimate(np.array([0.0, 1.0]), params)
    assert estimate.lower == pytest.approx(0.8)
    assert math.isinf(estimate.upper)
    assert estimate.witness_theta is None


def test_scan_starting_past_theta_max():
    params = ClcdParams(gamma=0.1, alpha=10.0, theta_max=0.25, grid_step=1e-3)
    estimate = clcd_estimate(np.array([0.0, 1.0]), params)
    assert estimate.lower == 0.25
    assert math.isinf(estimate.upper)


def test_lower_bound_for_spread_vectors():
    params = AlmostConstParams()
    for n in (12, 16):
        clcd_params = ClcdParams.defaults(n, grid_fraction=1e-2)
        floor = math.sqrt(params.delta * n) / 7.0
        for seed in range(10):
            v = sample_non_almost_constant(n, params, seed)
            assert clcd_estimate(v, clcd_params).lower >= floor


def test_default_parameters():
    params = ClcdParams.defaults(16, delta=0.1, rho=0.24)
    assert params.gamma == pytest.approx(0.001)
    assert params.alpha == pytest.approx(1.6)
    assert params.theta_max == pytest.approx(16.0)
    assert params.grid_step == pytest.approx(0.016)
    with pytest.raises(ParameterError):
        ClcdParams(gamma=1.5, alpha=1.0, theta_max=1.0, grid_step=0.1)
