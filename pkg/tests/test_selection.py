import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semdrift import (
    AllRunsRejected,
    ArdKernelParams,
    DegenerateDimensionWarning,
    NonFiniteGradient,
    OptimizerConfig,
    bandwidth_heuristic,
    gradient,
    objective,
    ratio_statistic,
    select_variables,
    soft_threshold,
)
from semdrift.selection import EPS_FLOOR, optimize_one

from _oracles import finite_difference_gradient


def shifted_data(seed, n=80, d=6, shift_dims=(0,), magnitude=1.5):
    rng = np.random.default_rng(seed)
    shift = np.zeros(d)
    shift[list(shift_dims)] = magnitude
    return rng.normal(size=(n, d)), rng.normal(size=(n, d)) + shift


class TestObjective:
    def test_zero_weights_hit_floor(self):
        X, Y = shifted_data(0)
        gamma = bandwidth_heuristic(X, Y)
        value = objective(np.zeros(X.shape[1]), X, Y, gamma, lam=0.5)
        assert value == pytest.approx(-np.log(EPS_FLOOR), abs=1e-3)
        assert value == pytest.approx(27.631, abs=1e-3)

    def test_lambda_zero_is_pure_log_ratio(self):
        X, Y = shifted_data(1)
        gamma = bandwidth_heuristic(X, Y)
        w = np.full(X.shape[1], 0.8)
        est = ratio_statistic(X, Y, ArdKernelParams(w, gamma))
        assert objective(w, X, Y, gamma, lam=0.0) == pytest.approx(
            -np.log(est.ratio), rel=1e-9
        )

    def test_penalty_linear_in_lambda(self):
        X, Y = shifted_data(2)
        gamma = bandwidth_heuristic(X, Y)
        w = np.full(X.shape[1], 0.7)
        base = objective(w, X, Y, gamma, lam=0.0)
        p1 = objective(w, X, Y, gamma, lam=0.3) - base
        p2 = objective(w, X, Y, gamma, lam=0.6) - base
        assert p2 == pytest.approx(2.0 * p1, rel=1e-9)


class TestGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(3)
        X, Y = shifted_data(3, n=20, d=5)
        gamma = bandwidth_heuristic(X, Y)
        for _ in range(5):
            w = rng.uniform(0.3, 1.5, 5)
            grad = gradient(w, X, Y, gamma)
            fd = finite_difference_gradient(
                lambda a: objective(a, X, Y, gamma, lam=0.0), w
            )
            for d in range(5):
                if abs(grad[d]) < 1e-8:
                    assert abs(grad[d] - fd[d]) < 1e-6
                else:
                    assert abs(grad[d] - fd[d]) / abs(fd[d]) < 1e-4

    def test_constant_dimension_zero_gradient(self):
        X, Y = shifted_data(4, n=30, d=4)
        X[:, 2] = 0.25
        Y[:, 2] = 0.25
        with pytest.warns(DegenerateDimensionWarning):
            gamma = bandwidth_heuristic(X, Y)
        grad = gradient(np.ones(4), X, Y, gamma)
        assert grad[2] == 0.0

    def test_floor_raises_nonfinite(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(30, 4))
        gamma = bandwidth_heuristic(X, X)
        with pytest.raises(NonFiniteGradient):
            gradient(np.ones(4), X, X, gamma)


class TestSoftThreshold:
    @given(
        st.floats(-50, 50, allow_nan=False),
        st.floats(0, 20, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_closed_form(self, w, t):
        got = soft_threshold(w, t)
        assert got == np.sign(w) * max(abs(w) - t, 0.0)

    def test_vectorized(self):
        np.testing.assert_array_equal(
            soft_threshold([-2.0, -0.5, 0.0, 0.5, 2.0], 1.0),
            [-1.0, 0.0, 0.0, 0.0, 1.0],
        )


class TestOptimizeOne:
    def test_huge_lambda_zeroes_everything_fast(self):
        X, Y = shifted_data(6)
        gamma = bandwidth_heuristic(X, Y)
        config = OptimizerConfig(seed=0)
        w, diag = optimize_one(X, Y, gamma, 1e3, config)
        np.testing.assert_array_equal(w, np.zeros(X.shape[1]))
        assert diag["iterations"] <= 5

    def test_weights_stay_nonnegative_and_objective_monotone(self):
        X, Y = shifted_data(7, d=5)
        gamma = bandwidth_heuristic(X, Y)
        config = OptimizerConfig(seed=0, max_iters=120)
        w, diag = optimize_one(X, Y, gamma, 0.2, config)
        assert np.all(w >= 0.0)
        trace = np.array(diag["objective_trace"])
        assert np.all(np.diff(trace) <= 0.0)

    def test_concentrates_on_shifted_dimension(self):
        X, Y = shifted_data(8, n=150, d=10, shift_dims=(0,), magnitude=1.5)
        gamma = bandwidth_heuristic(X, Y)
        w, _ = optimize_one(X, Y, gamma, 0.2, OptimizerConfig(seed=0))
        assert int(np.argmax(w)) == 0

    def test_floor_at_init_stops_immediately(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(30, 3))
        gamma = bandwidth_heuristic(X, X)
        w, diag = optimize_one(X, X, gamma, 0.1, OptimizerConfig(seed=0))
        assert diag["stopped"] == "ratio_floor"
        assert diag["converged"] is False


class TestSelectVariables:
    def test_recovers_planted_dimensions(self):
        X, Y = shifted_data(10, n=150, d=8, shift_dims=(0, 1), magnitude=1.5)
        config = OptimizerConfig(
            lambda_grid=(0.05, 0.2, 0.8), cv_folds=3, seed=0, max_iters=300
        )
        result = select_variables(X, Y, config)
        assert result.selected == (0, 1)

    def test_deterministic_under_seed(self):
        X, Y = shifted_data(11, n=100, d=6)
        config = OptimizerConfig(lambda_grid=(0.1, 0.5), cv_folds=3, seed=42)
        r1 = select_variables(X, Y, config)
        r2 = select_variables(X, Y, config)
        assert r1.selected == r2.selected
        np.testing.assert_array_equal(r1.stability, r2.stability)
        for a, b in zip(r1.runs, r2.runs):
            np.testing.assert_array_equal(a.weights, b.weights)
            assert a.validation_ratio == b.validation_ratio

    def test_single_lambda_two_folds_stability_values(self):
        X, Y = shifted_data(12, n=80, d=5)
        config = OptimizerConfig(lambda_grid=(0.2,), cv_folds=2, seed=1)
        result = select_variables(X, Y, config)
        assert set(np.unique(result.stability)) <= {0.0, 0.5, 1.0}

    def test_all_constant_rows_reject_every_run(self):
        X = np.full((40, 4), 1.5)
        Y = np.full((40, 4), 1.5)
        config = OptimizerConfig(lambda_grid=(0.1, 1.0), cv_folds=2, seed=0)
        with pytest.warns(DegenerateDimensionWarning):
            with pytest.raises(AllRunsRejected):
                select_variables(X, Y, config)

    def test_null_case_selects_nothing(self):
        # P = Q: either every run is rejected or the aggregate is empty in
        # at least 90% of seeds.
        config = OptimizerConfig(max_iters=150)
        ok = 0
        seeds = range(50)
        for seed in seeds:
            rng = np.random.default_rng(1000 + seed)
            X = rng.normal(size=(100, 8))
            Y = rng.normal(size=(100, 8))
            try:
                result = select_variables(X, Y, config)
                ok += result.selected == ()
            except AllRunsRejected:
                ok += 1
        assert ok >= 0.9 * len(seeds)

    def test_scale_robustness(self):
        X, Y = shifted_data(13, n=120, d=6, shift_dims=(1,), magnitude=1.5)
        config = OptimizerConfig(lambda_grid=(0.1, 0.4), cv_folds=3, seed=3)
        base = select_variables(X, Y, config)
        scaled = select_variables(8.5 * X, 8.5 * Y, config)
        assert base.selected == scaled.selected

    def test_result_serializes_to_json(self):
        X, Y = shifted_data(14, n=60, d=4)
        config = OptimizerConfig(lambda_grid=(0.2,), cv_folds=2, seed=0)
        result = select_variables(X, Y, config)
        blob = json.dumps(result.to_json_dict())
        parsed = json.loads(blob)
        assert parsed["selected"] == list(result.selected)
        assert len(parsed["stability"]) == 4
        assert len(parsed["runs"]) == 2
        assert (0.2, 0) in result.per_run_weights
        assert (0.2, 1) in result.per_run_objective


class TestOptimizerConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(lambda_grid=(0.0, 1.0))
        with pytest.raises(ValueError):
            OptimizerConfig(lambda_grid=(1.0, 0.1))
        with pytest.raises(ValueError):
            OptimizerConfig(selection_threshold=0.0)
        with pytest.raises(ValueError):
            OptimizerConfig(cv_folds=1)
        with pytest.raises(ValueError):
            OptimizerConfig(init="zeros")
        with pytest.raises(ValueError):
            OptimizerConfig(weight_cutoff=0.0)

    def test_text_round_trip(self):
        config = OptimizerConfig(lambda_grid=(0.01, 0.1), cv_folds=3, seed=9)
        text = config.to_text()
        assert OptimizerConfig.from_text(text) == config

    def test_defaults_span_the_grid(self):
        config = OptimizerConfig()
        assert len(config.lambda_grid) == 8
        assert config.lambda_grid[0] == pytest.approx(1e-3)
        assert config.lambda_grid[-1] == pytest.approx(10.0)
        assert config.cv_folds == 5
        assert config.selection_threshold == 0.5
        assert config.weight_cutoff == 1e-3
        assert config.step_size == 0.05
