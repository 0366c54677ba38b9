"""Unbiased MMD^2 estimator, its empirical variance, and the ratio statistic.

The estimator is the standard U-statistic form with diagonal terms excluded
from the within-sample sums, generalized to unequal sample sizes:

    MMD^2 = sum_{i != i'} k(x_i, x_i') / (n(n-1))
          + sum_{j != j'} k(y_j, y_j') / (m(m-1))
          - 2 sum_{i,j} k(x_i, y_j) / (nm)

The variance estimate is the first-order (delta-method) variance of this
U-statistic, computed from centered per-sample witness sums

    hx_i = mean_{i' != i} k(x_i, x_i') - mean_j k(x_i, y_j)
    hy_j = mean_{j' != j} k(y_j, y_j') - mean_i k(x_i, y_j)
    V    = 4/n * popvar(hx) + 4/m * popvar(hy)

clamped at zero.  This is the swap point if a different closed-form
estimator is preferred; the ratio statistic only requires V >= 0 and
V -> 0 for a constant kernel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SampleTooSmall
from .kernel import kernel_matrix

__all__ = ["STABILITY_C", "MmdEstimate", "mmd_unbiased", "mmd_variance", "ratio_statistic"]

# Additive constant under the square root of the ratio denominator.
STABILITY_C = 1e-8


@dataclass(frozen=True)
class MmdEstimate:
    mmd_sq: float
    variance: float
    ratio: float
    n_x: int
    n_y: int


def _canonical(X, Y):
    """Order the two samples deterministically so swapped calls share bits."""
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    Y = np.ascontiguousarray(np.asarray(Y, dtype=np.float64))
    if X.shape[0] < Y.shape[0]:
        return Y, X
    if X.shape[0] == Y.shape[0] and X.tobytes() > Y.tobytes():
        return Y, X
    return X, Y


def _blocks(X, Y, params):
    return kernel_matrix(X, X, params), kernel_matrix(Y, Y, params), kernel_matrix(X, Y, params)


def _stats_from_blocks(Kxx, Kyy, Kxy):
    """(mmd_sq, variance, centered witness vectors) sharing one set of row sums."""
    n = Kxx.shape[0]
    m = Kyy.shape[0]
    rxx = Kxx.sum(axis=1) - np.diagonal(Kxx)
    ryy = Kyy.sum(axis=1) - np.diagonal(Kyy)
    rxy = Kxy.sum(axis=1)
    cxy = Kxy.sum(axis=0)
    sxy = rxy.sum()
    mmd_sq = rxx.sum() / (n * (n - 1)) + ryy.sum() / (m * (m - 1)) - 2.0 * sxy / (n * m)
    hx = rxx / (n - 1) - rxy / m
    hy = ryy / (m - 1) - cxy / n
    hxc = hx - hx.mean()
    hyc = hy - hy.mean()
    variance = max(4.0 / n * np.mean(hxc * hxc) + 4.0 / m * np.mean(hyc * hyc), 0.0)
    return mmd_sq, variance, hxc, hyc


def _mmd_from_blocks(Kxx, Kyy, Kxy):
    return _stats_from_blocks(Kxx, Kyy, Kxy)[0]


def _variance_from_blocks(Kxx, Kyy, Kxy):
    return _stats_from_blocks(Kxx, Kyy, Kxy)[1]


def _check_sizes(X, Y, minimum):
    if X.shape[0] < minimum or Y.shape[0] < minimum:
        raise SampleTooSmall(
            f"need at least {minimum} samples per side, got {X.shape[0]} and {Y.shape[0]}"
        )


def mmd_unbiased(X, Y, params):
    """Unbiased MMD^2 estimate; may be negative on finite samples."""
    X, Y = _canonical(X, Y)
    _check_sizes(X, Y, 2)
    return float(_mmd_from_blocks(*_blocks(X, Y, params)))


def mmd_variance(X, Y, params):
    """Nonnegative empirical variance estimate of the unbiased MMD^2."""
    X, Y = _canonical(X, Y)
    _check_sizes(X, Y, 4)
    return float(_variance_from_blocks(*_blocks(X, Y, params)))


def ratio_statistic(X, Y, params):
    """MMD^2 over sqrt(variance + C); the test-power surrogate."""
    n_x, n_y = np.shape(X)[0], np.shape(Y)[0]
    X, Y = _canonical(X, Y)
    _check_sizes(X, Y, 4)
    Kxx, Kyy, Kxy = _blocks(X, Y, params)
    mmd_sq = float(_mmd_from_blocks(Kxx, Kyy, Kxy))
    variance = float(_variance_from_blocks(Kxx, Kyy, Kxy))
    ratio = mmd_sq / np.sqrt(variance + STABILITY_C)
    return MmdEstimate(mmd_sq, variance, float(ratio), n_x, n_y)
