"""Hot numeric kernels with numba and pure-numpy implementations.

Every function here exists twice: a ``*_numpy`` version built on BLAS and
vectorized numpy, and a ``*_numba`` version compiled with ``@njit``.  The
module-level names (``kernel_matrix``, ``weighted_sqdiff_sums``,
``permutation_stats``, ``pairwise_bandwidths``) point at the numba build
unless the environment variable ``SEMDRIFT_NUMBA`` is set to ``0``/``false``
/``off`` or numba is not importable, in which case the numpy fallback is
used.  ``benchmarks/bench_backends.py`` times the two side by side.

All inputs are expected as C-contiguous float64 arrays; callers normalize.
Reductions are ordered (row-wise accumulation, then a sequential pass over
rows), so a given backend returns identical bits for identical inputs.
"""

import os

import numpy as np

_flag = os.environ.get("SEMDRIFT_NUMBA", "1").strip().lower()
_want_numba = _flag not in {"0", "false", "off", "no"}

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# Gaussian kernel matrix over pre-scaled coordinates:
#   K[i, j] = exp(-sum_d (X[i,d] - Y[j,d])**2)
# Callers fold the ARD weight, bandwidth, and 1/D normalization into the
# coordinates beforehand.  ``out`` lets hot loops reuse a buffer.
# ---------------------------------------------------------------------------

def kernel_matrix_numpy(X, Y, out=None):
    rx = np.einsum("ij,ij->i", X, X)
    ry = np.einsum("ij,ij->i", Y, Y)
    if out is None:
        out = np.empty((X.shape[0], Y.shape[0]))
    np.matmul(X, Y.T, out=out)
    out *= -2.0
    # rx_i + ry_j is summed first so swapping X and Y flips only the order
    # of a commutative addition, keeping K(X, Y) == K(Y, X).T bit for bit
    out += rx[:, None] + ry[None, :]
    np.maximum(out, 0.0, out=out)
    np.negative(out, out=out)
    np.exp(out, out=out)
    return out


@njit(cache=True)
def _kernel_matrix_numba(X, Y, out):
    n, d = X.shape
    m = Y.shape[0]
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(d):
                diff = X[i, k] - Y[j, k]
                s += diff * diff
            out[i, j] = np.exp(-s)
    return out


def kernel_matrix_numba(X, Y, out=None):
    if out is None:
        out = np.empty((X.shape[0], Y.shape[0]))
    return _kernel_matrix_numba(X, Y, out)


# ---------------------------------------------------------------------------
# Per-dimension squared-difference sums, unweighted and row-weighted in one
# pass (they share the K @ B product, the dominant cost):
#   out[0, d] = sum_ij        K[i,j] * (A[i,d] - B[j,d])**2
#   out[1, d] = sum_ij u[i] * K[i,j] * (A[i,d] - B[j,d])**2
# This is the workhorse of the analytic gradient.
# ---------------------------------------------------------------------------

def sqdiff_sums_dual_numpy(K, A, B, u):
    KB = K @ B
    row = K.sum(axis=1)
    col = K.sum(axis=0)
    A2 = A * A
    B2 = B * B
    w0 = row @ A2 + col @ B2 - 2.0 * (A * KB).sum(axis=0)
    w1 = (u * row) @ A2 + (u @ K) @ B2 - 2.0 * ((A * u[:, None]) * KB).sum(axis=0)
    return np.stack((w0, w1))


@njit(cache=True)
def sqdiff_sums_dual_numba(K, A, B, u):
    n, d = A.shape
    m = B.shape[0]
    out = np.zeros((2, d))
    for i in range(n):
        ui = u[i]
        for j in range(m):
            kij = K[i, j]
            kui = kij * ui
            for k in range(d):
                diff = A[i, k] - B[j, k]
                s = diff * diff
                out[0, k] += kij * s
                out[1, k] += kui * s
    return out


# ---------------------------------------------------------------------------
# Permutation null statistics from a pooled kernel matrix.  perms holds one
# permutation of 0..N-1 per row; the first n permuted indices form the X
# group.  Returns the unbiased MMD^2 statistic per permutation.
# ---------------------------------------------------------------------------

def permutation_stats_numpy(K, n, perms):
    N = K.shape[0]
    m = N - n
    diag = np.diagonal(K)
    out = np.empty(perms.shape[0])
    for p in range(perms.shape[0]):
        idx = perms[p]
        Kp = K[np.ix_(idx, idx)]
        sxx = Kp[:n, :n].sum() - diag[idx[:n]].sum()
        syy = Kp[n:, n:].sum() - diag[idx[n:]].sum()
        sxy = Kp[:n, n:].sum()
        out[p] = sxx / (n * (n - 1)) + syy / (m * (m - 1)) - 2.0 * sxy / (n * m)
    return out


@njit(cache=True)
def permutation_stats_numba(K, n, perms):
    N = K.shape[0]
    m = N - n
    P = perms.shape[0]
    out = np.empty(P)
    for p in range(P):
        idx = perms[p]
        sxx = 0.0
        syy = 0.0
        sxy = 0.0
        for a in range(N):
            ia = idx[a]
            for b in range(a + 1, N):
                v = K[ia, idx[b]]
                if a < n:
                    if b < n:
                        sxx += v
                    else:
                        sxy += v
                else:
                    syy += v
        out[p] = (2.0 * sxx / (n * (n - 1)) + 2.0 * syy / (m * (m - 1))
                  - 2.0 * sxy / (n * m))
    return out


# ---------------------------------------------------------------------------
# Dimension-wise pairwise-distance bandwidths over a pooled sample.  Zero
# distances are excluded; a dimension whose distances are all zero yields
# 0.0 and the caller applies its fallback policy.
# ---------------------------------------------------------------------------

def pairwise_bandwidths_numpy(Z, use_median):
    N, D = Z.shape
    ii, jj = np.triu_indices(N, k=1)
    out = np.empty(D)
    for d in range(D):
        col = Z[:, d]
        dist = np.abs(col[ii] - col[jj])
        nz = dist[dist > 0.0]
        if nz.size == 0:
            out[d] = 0.0
        elif use_median:
            out[d] = np.median(nz)
        else:
            out[d] = nz.mean()
    return out


@njit(cache=True)
def pairwise_bandwidths_numba(Z, use_median):
    N, D = Z.shape
    npairs = N * (N - 1) // 2
    buf = np.empty(npairs)
    out = np.empty(D)
    for d in range(D):
        cnt = 0
        for i in range(N):
            zi = Z[i, d]
            for j in range(i + 1, N):
                v = abs(zi - Z[j, d])
                if v > 0.0:
                    buf[cnt] = v
                    cnt += 1
        if cnt == 0:
            out[d] = 0.0
        elif use_median:
            out[d] = np.median(buf[:cnt].copy())
        else:
            out[d] = buf[:cnt].mean()
    return out


USING_NUMBA = HAVE_NUMBA and _want_numba
BACKEND = "numba" if USING_NUMBA else "numpy"

if USING_NUMBA:
    # Index-heavy loops are where @njit wins; the GEMM-shaped ops
    # (kernel matrix, gradient reductions) stay on BLAS-backed numpy,
    # which benchmarks faster at pipeline sizes (see benchmarks/).
    kernel_matrix = kernel_matrix_numpy
    sqdiff_sums_dual = sqdiff_sums_dual_numpy
    permutation_stats = permutation_stats_numba
    pairwise_bandwidths = pairwise_bandwidths_numba
else:
    kernel_matrix = kernel_matrix_numpy
    sqdiff_sums_dual = sqdiff_sums_dual_numpy
    permutation_stats = permutation_stats_numpy
    pairwise_bandwidths = pairwise_bandwidths_numpy
