"""Independent brute-force oracles the optimized implementations are checked
against.  Everything here is written as plain loops straight from the
definitions, deliberately sharing no code with the package internals."""

import numpy as np


def kernel_value_loop(x, y, weights, bandwidths):
    """ARD kernel by direct per-dimension summation."""
    D = len(weights)
    s = 0.0
    for d in range(D):
        s += (weights[d] ** 2) * (x[d] - y[d]) ** 2 / bandwidths[d] ** 2
    return np.exp(-s / D)


def kernel_matrix_loop(X, Y, weights, bandwidths):
    n, m = len(X), len(Y)
    K = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            K[i, j] = kernel_value_loop(X[i], Y[j], weights, bandwidths)
    return K


def mmd_unbiased_loop(X, Y, weights, bandwidths):
    """Triple-loop unbiased MMD^2: diagonal excluded from within-sample sums."""
    n, m = len(X), len(Y)
    sxx = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                sxx += kernel_value_loop(X[i], X[j], weights, bandwidths)
    syy = 0.0
    for i in range(m):
        for j in range(m):
            if i != j:
                syy += kernel_value_loop(Y[i], Y[j], weights, bandwidths)
    sxy = 0.0
    for i in range(n):
        for j in range(m):
            sxy += kernel_value_loop(X[i], Y[j], weights, bandwidths)
    return sxx / (n * (n - 1)) + syy / (m * (m - 1)) - 2.0 * sxy / (n * m)


def mmd_variance_loop(X, Y, weights, bandwidths):
    """Independent implementation of the first-order variance estimate:
    4/n * popvar(hx) + 4/m * popvar(hy) over the centered witness sums."""
    n, m = len(X), len(Y)
    hx = np.zeros(n)
    for i in range(n):
        within = sum(
            kernel_value_loop(X[i], X[j], weights, bandwidths)
            for j in range(n) if j != i
        )
        across = sum(kernel_value_loop(X[i], Y[j], weights, bandwidths) for j in range(m))
        hx[i] = within / (n - 1) - across / m
    hy = np.zeros(m)
    for j in range(m):
        within = sum(
            kernel_value_loop(Y[j], Y[k], weights, bandwidths)
            for k in range(m) if k != j
        )
        across = sum(kernel_value_loop(X[i], Y[j], weights, bandwidths) for i in range(n))
        hy[j] = within / (m - 1) - across / n
    var = 4.0 / n * np.mean((hx - hx.mean()) ** 2) + 4.0 / m * np.mean((hy - hy.mean()) ** 2)
    return max(var, 0.0)


def bandwidths_loop(Z, mode="median"):
    """Dimension-wise pairwise-distance heuristic by pair enumeration."""
    N, D = Z.shape
    out = np.empty(D)
    for d in range(D):
        dists = []
        for i in range(N):
            for j in range(i + 1, N):
                v = abs(Z[i, d] - Z[j, d])
                if v > 0.0:
                    dists.append(v)
        if not dists:
            out[d] = 0.0
        elif mode == "median":
            out[d] = np.median(dists)
        else:
            out[d] = np.mean(dists)
    return out


def finite_difference_gradient(fn, weights, h=1e-5):
    """Central differences of a scalar function of the weight vector."""
    weights = np.asarray(weights, dtype=np.float64)
    grad = np.zeros_like(weights)
    for d in range(len(weights)):
        e = np.zeros_like(weights)
        e[d] = h
        grad[d] = (fn(weights + e) - fn(weights - e)) / (2.0 * h)
    return grad


def cosine_distance_loop(u, v):
    num = sum(a * b for a, b in zip(u, v))
    nu = np.sqrt(sum(a * a for a in u))
    nv = np.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return 1.0 - num / (nu * nv)
