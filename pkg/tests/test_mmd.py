import numpy as np
import pytest

from semdrift import (
    STABILITY_C,
    ArdKernelParams,
    SampleTooSmall,
    mmd_unbiased,
    mmd_variance,
    ratio_statistic,
)

from _oracles import mmd_unbiased_loop, mmd_variance_loop


def unit_params(d):
    return ArdKernelParams(np.ones(d), np.ones(d))


def random_instance(rng, max_n=10, max_d=5):
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    X = rng.normal(size=(n, d))
    Y = rng.normal(size=(m, d)) + rng.normal() * 0.5
    w = rng.uniform(0.0, 2.0, d)
    g = rng.uniform(0.3, 2.0, d)
    return X, Y, ArdKernelParams(w, g)


class TestMmdUnbiased:
    def test_hand_value_two_by_two(self):
        # n=m=2, D=1, X={0,0}, Y={1,1}: 1 + 1 - 2 e^{-1}
        X = np.array([[0.0], [0.0]])
        Y = np.array([[1.0], [1.0]])
        expected = 2.0 - 2.0 * np.exp(-1.0)
        assert mmd_unbiased(X, Y, unit_params(1)) == pytest.approx(expected, abs=1e-12)

    def test_zero_weights_give_exact_zero(self):
        rng = np.random.default_rng(0)
        X, Y = rng.normal(size=(5, 3)), rng.normal(size=(7, 3))
        params = ArdKernelParams(np.zeros(3), np.ones(3))
        assert mmd_unbiased(X, Y, params) == 0.0

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            X, Y, params = random_instance(rng)
            got = mmd_unbiased(X, Y, params)
            want = mmd_unbiased_loop(X, Y, params.weights, params.bandwidths)
            assert got == pytest.approx(want, abs=1e-12)

    def test_swap_symmetry_is_exact(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            X, Y, params = random_instance(rng)
            assert mmd_unbiased(X, Y, params) == mmd_unbiased(Y, X, params)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(3)
        X, Y, params = random_instance(rng)
        base = mmd_unbiased(X, Y, params)
        for _ in range(5):
            Xp = X[rng.permutation(len(X))]
            Yp = Y[rng.permutation(len(Y))]
            assert mmd_unbiased(Xp, Yp, params) == pytest.approx(base, abs=1e-12)

    def test_sample_too_small(self):
        with pytest.raises(SampleTooSmall):
            mmd_unbiased(np.zeros((1, 2)), np.zeros((5, 2)), unit_params(2))

    def test_unbiased_under_null(self):
        # Monte-Carlo mean over resamples from P = Q should sit within
        # 3 standard errors of zero.
        rng = np.random.default_rng(4)
        params = unit_params(2)
        values = np.array([
            mmd_unbiased(rng.normal(size=(8, 2)), rng.normal(size=(8, 2)), params)
            for _ in range(1000)
        ])
        se = values.std(ddof=1) / np.sqrt(len(values))
        assert abs(values.mean()) < 3.0 * se


class TestMmdVariance:
    def test_constant_kernel_gives_zero(self):
        rng = np.random.default_rng(5)
        X, Y = rng.normal(size=(6, 3)), rng.normal(size=(5, 3))
        params = ArdKernelParams(np.zeros(3), np.ones(3))
        assert mmd_variance(X, Y, params) == 0.0

    def test_matches_independent_implementation(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            X, Y, params = random_instance(rng)
            if len(X) < 4 or len(Y) < 4:
                continue
            got = mmd_variance(X, Y, params)
            want = mmd_variance_loop(X, Y, params.weights, params.bandwidths)
            assert got == pytest.approx(want, abs=1e-10)

    def test_scale_invariance_with_bandwidths(self):
        rng = np.random.default_rng(7)
        X, Y = rng.normal(size=(8, 3)), rng.normal(size=(6, 3))
        w = rng.uniform(0.2, 2.0, 3)
        g = rng.uniform(0.3, 2.0, 3)
        v1 = mmd_variance(X, Y, ArdKernelParams(w, g))
        c = 3.7
        v2 = mmd_variance(c * X, c * Y, ArdKernelParams(w, c * g))
        assert v2 == pytest.approx(v1, abs=1e-10)

    def test_nonnegative(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            X, Y, params = random_instance(rng)
            if len(X) < 4 or len(Y) < 4:
                continue
            assert mmd_variance(X, Y, params) >= 0.0

    def test_sample_too_small(self):
        with pytest.raises(SampleTooSmall):
            mmd_variance(np.zeros((3, 2)), np.zeros((5, 2)), unit_params(2))


class TestRatioStatistic:
    def test_zero_weights(self):
        rng = np.random.default_rng(9)
        X, Y = rng.normal(size=(5, 2)), rng.normal(size=(6, 2))
        est = ratio_statistic(X, Y, ArdKernelParams(np.zeros(2), np.ones(2)))
        assert est.mmd_sq == 0.0
        assert est.variance == 0.0
        assert est.ratio == 0.0

    def test_ratio_definition_and_sign(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            X, Y, params = random_instance(rng)
            if len(X) < 4 or len(Y) < 4:
                continue
            est = ratio_statistic(X, Y, params)
            assert est.ratio == est.mmd_sq / np.sqrt(est.variance + STABILITY_C)
            assert np.sign(est.ratio) == np.sign(est.mmd_sq)
            assert est.n_x == len(X) and est.n_y == len(Y)

    def test_separated_samples_positive(self):
        rng = np.random.default_rng(11)
        X = rng.normal(0.0, 1.0, size=(50, 1))
        Y = rng.normal(10.0, 1.0, size=(50, 1))
        est = ratio_statistic(X, Y, unit_params(1))
        assert est.ratio > 0.0
