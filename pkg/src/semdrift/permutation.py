"""Permutation test of distribution equality on a selected variable subspace.

The two samples are projected onto the selected coordinates; bandwidths are
recomputed on the projected pooled data (the subspace becomes the ambient
space, so the kernel exponent normalizes by |S|); the statistic is the
unbiased MMD^2 with unit ARD weights.  The null distribution comes from
seeded random relabelings of the pooled rows into two groups of the
original sizes, and the p-value uses the add-one convention

    p = (1 + #{null >= observed}) / (1 + n_permutations)

so it is never exactly zero.  Pooled rows are put in a canonical
(lexicographically sorted) order before permuting, which makes the p-value
invariant to swapping the two samples when their sizes are equal.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import EmptySelection, SampleTooSmall
from .kernel import ArdKernelParams, bandwidth_heuristic, kernel_matrix
from .mmd import mmd_unbiased

__all__ = ["PermutationTestResult", "permutation_test"]


@dataclass(frozen=True)
class PermutationTestResult:
    p_value: float
    observed_stat: float
    n_permutations: int
    selected_vars: tuple
    null_stats: np.ndarray | None = None

    def to_json_dict(self):
        return {
            "p_value": self.p_value,
            "observed_stat": self.observed_stat,
            "n_permutations": self.n_permutations,
            "n_selected": len(self.selected_vars),
        }


def _canonical_rows(Z):
    order = np.lexsort(tuple(Z[:, d] for d in range(Z.shape[1] - 1, -1, -1)))
    return np.ascontiguousarray(Z[order])


def permutation_test(X_test, Y_test, selected, n_permutations=500, seed=0,
                     retain_null=False, bandwidth_mode="median"):
    """Two-sample permutation test restricted to the selected coordinates."""
    selected = tuple(sorted(int(d) for d in selected))
    if not selected:
        raise EmptySelection("permutation test undefined for an empty variable set")
    X = np.asarray(X_test, dtype=np.float64)
    Y = np.asarray(Y_test, dtype=np.float64)
    n, m = X.shape[0], Y.shape[0]
    if n < 2 or m < 2:
        raise SampleTooSmall(f"need at least 2 samples per side, got {n} and {m}")
    Xp = np.ascontiguousarray(X[:, selected])
    Yp = np.ascontiguousarray(Y[:, selected])

    gamma = bandwidth_heuristic(Xp, Yp, mode=bandwidth_mode)
    params = ArdKernelParams.unit(gamma)
    observed = mmd_unbiased(Xp, Yp, params)

    pooled = _canonical_rows(np.vstack([Xp, Yp]))
    K = kernel_matrix(pooled, pooled, params)
    rng = np.random.default_rng(seed)
    if n_permutations > 0:
        perms = np.ascontiguousarray(
            np.vstack([rng.permutation(n + m) for _ in range(n_permutations)]).astype(np.int64)
        )
        null_stats = _accel.permutation_stats(K, n, perms)
    else:
        null_stats = np.empty(0)
    exceed = int(np.count_nonzero(null_stats >= observed))
    p_value = (1.0 + exceed) / (1.0 + n_permutations)
    return PermutationTestResult(
        p_value=float(p_value),
        observed_stat=float(observed),
        n_permutations=int(n_permutations),
        selected_vars=selected,
        null_stats=null_stats if retain_null else None,
    )
