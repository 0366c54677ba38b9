"""ARD Gaussian kernel and the dimension-wise bandwidth heuristic.

The kernel is k(x, y) = exp(-(1/D) * sum_d a_d^2 (x_d - y_d)^2 / g_d^2)
with per-dimension weights a_d >= 0 and bandwidths g_d > 0.  Bandwidths
come from the dimension-wise median (or mean) of the nonzero pairwise
coordinate distances over the pooled sample.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DegenerateDimensionWarning, DimensionMismatch

__all__ = ["ArdKernelParams", "kernel_value", "kernel_matrix", "bandwidth_heuristic"]


@dataclass(frozen=True)
class ArdKernelParams:
    """Per-dimension ARD weights and bandwidths."""

    weights: np.ndarray
    bandwidths: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        g = np.ascontiguousarray(np.asarray(self.bandwidths, dtype=np.float64))
        if w.ndim != 1 or g.ndim != 1 or w.shape != g.shape:
            raise DimensionMismatch(
                f"weights shape {w.shape} and bandwidths shape {g.shape} must be equal 1-D"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("ARD weights must be finite and nonnegative")
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValueError("bandwidths must be finite and strictly positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bandwidths", g)

    @property
    def dim(self):
        return self.weights.shape[0]

    def scaled(self):
        """Combined per-dimension scale a_d / (g_d * sqrt(D))."""
        return self.weights / (self.bandwidths * np.sqrt(self.dim))

    @classmethod
    def unit(cls, bandwidths):
        return cls(np.ones(len(bandwidths)), bandwidths)


def _as_matrix(X, dim, name):
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[1] != dim:
        raise DimensionMismatch(f"{name} has dimension {X.shape[1]}, expected {dim}")
    return X


def kernel_value(x, y, params):
    """Evaluate the ARD kernel at a single pair of vectors; result in (0, 1]."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != params.dim or y.shape[0] != params.dim:
        raise DimensionMismatch(
            f"vectors of length {x.shape[0]}/{y.shape[0]} vs kernel dim {params.dim}"
        )
    diff = (x - y) * params.scaled()
    return float(np.exp(-np.dot(diff, diff)))


def kernel_matrix(X, Y, params):
    """Pairwise kernel matrix; entry (i, j) equals kernel_value(X[i], Y[j])."""
    same = X is Y
    X = _as_matrix(X, params.dim, "X")
    Y = _as_matrix(Y, params.dim, "Y")
    w = params.scaled()
    K = _accel.kernel_matrix(np.ascontiguousarray(X * w), np.ascontiguousarray(Y * w))
    # Identical row sets have an exactly-unit diagonal; the GEMM-based path
    # can leave it at 1 - O(eps) otherwise.
    if same or (X.shape == Y.shape and np.array_equal(X, Y)):
        np.fill_diagonal(K, 1.0)
    return K


def bandwidth_heuristic(X, Y, mode="median"):
    """Per-dimension bandwidths from pooled pairwise coordinate distances.

    Pools X and Y, takes the median (or mean) of the nonzero |z_d - z'_d|
    per dimension.  A dimension that is constant in the pooled sample gets
    a fallback bandwidth of 1.0 and raises DegenerateDimensionWarning.
    """
    if mode not in ("median", "mean"):
        raise ValueError(f"mode must be 'median' or 'mean', got {mode!r}")
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    Y = np.ascontiguousarray(np.asarray(Y, dtype=np.float64))
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(
            f"X {X.shape} and Y {Y.shape} must be 2-D with equal width"
        )
    Z = np.ascontiguousarray(np.vstack([X, Y]))
    if Z.shape[0] < 2:
        raise ValueError("bandwidth heuristic needs a pooled sample of size >= 2")
    gamma = _accel.pairwise_bandwidths(Z, mode == "median")
    degenerate = gamma == 0.0
    if degenerate.any():
        dims = np.flatnonzero(degenerate)
        warnings.warn(
            f"constant pooled dimension(s) {dims.tolist()}: bandwidth fell back to 1.0",
            DegenerateDimensionWarning,
            stacklevel=2,
        )
        gamma = gamma.copy()
        gamma[degenerate] = 1.0
    return gamma
