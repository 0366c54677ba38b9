"""L1-regularized ratio optimization and cross-validated variable aggregation.

The per-run objective is

    f(a) = -log(max(ratio(a), 1e-12)) + lambda * sum_d |a_d|

minimized by proximal gradient descent: a gradient step on the smooth part,
a soft-threshold by step*lambda, and projection onto a_d >= 0.  Runs are
repeated over a lambda grid and K data folds; a run votes for the
dimensions whose final weight clears ``weight_cutoff``, but only if its
held-out-fold ratio is positive.  Per-dimension stability is the number of
surviving votes over the total number of (lambda, fold) runs, so a
discarded run counts against selection rather than shrinking the
electorate.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import AllRunsRejected, NonFiniteGradient, SampleTooSmall
from .kernel import ArdKernelParams, bandwidth_heuristic
from .mmd import STABILITY_C, _stats_from_blocks, ratio_statistic

__all__ = [
    "EPS_FLOOR",
    "OptimizerConfig",
    "RunRecord",
    "SelectionResult",
    "soft_threshold",
    "objective",
    "gradient",
    "optimize_one",
    "select_variables",
]

# Floor inside the log; a nonpositive ratio becomes a large finite penalty.
EPS_FLOOR = 1e-12

_MAX_BACKTRACKS = 30


def _default_lambda_grid():
    return tuple(float(v) for v in np.logspace(-3.0, 1.0, 8))


@dataclass(frozen=True)
class OptimizerConfig:
    lambda_grid: tuple = field(default_factory=_default_lambda_grid)
    max_iters: int = 600
    step_size: float = 0.05
    tolerance: float = 3e-4
    init: str = "ones"
    seed: int = 0
    cv_folds: int = 5
    selection_threshold: float = 0.5
    weight_cutoff: float = 1e-3

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid or any(v <= 0 for v in grid) or list(grid) != sorted(grid):
            raise ValueError("lambda_grid must be strictly positive and sorted ascending")
        object.__setattr__(self, "lambda_grid", grid)
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.init not in ("ones", "heuristic_scaled"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        if not 0.0 < self.selection_threshold <= 1.0:
            raise ValueError("selection_threshold must be in (0, 1]")
        if self.weight_cutoff <= 0:
            raise ValueError("weight_cutoff must be positive")

    def to_text(self):
        from .configio import dumps_kv

        return dumps_kv(
            {
                "lambda_grid": list(self.lambda_grid),
                "max_iters": self.max_iters,
                "step_size": self.step_size,
                "tolerance": self.tolerance,
                "init": self.init,
                "seed": self.seed,
                "cv_folds": self.cv_folds,
                "selection_threshold": self.selection_threshold,
                "weight_cutoff": self.weight_cutoff,
            }
        )

    @classmethod
    def from_text(cls, text):
        from .configio import loads_kv

        raw = loads_kv(text)
        if "lambda_grid" in raw:
            grid = raw["lambda_grid"]
            raw["lambda_grid"] = tuple(grid) if isinstance(grid, list) else (grid,)
        return cls(**raw)


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one (lambda, fold) optimization run."""

    lam: float
    fold: int
    weights: np.ndarray
    objective: float
    validation_ratio: float
    kept: bool
    selected_dims: tuple
    converged: bool
    iterations: int
    stopped: str


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple
    stability: np.ndarray
    runs: tuple
    bandwidths: np.ndarray

    @property
    def per_run_weights(self):
        return {(r.lam, r.fold): r.weights for r in self.runs}

    @property
    def per_run_objective(self):
        return {(r.lam, r.fold): r.objective for r in self.runs}

    def to_json_dict(self):
        return {
            "selected": list(self.selected),
            "stability": self.stability.tolist(),
            "runs": [
                {
                    "lambda": r.lam,
                    "fold": r.fold,
                    "weights": r.weights.tolist(),
                    "objective": r.objective,
                    "validation_ratio": r.validation_ratio,
                    "kept": r.kept,
                    "selected_dims": list(r.selected_dims),
                    "converged": r.converged,
                    "iterations": r.iterations,
                    "stopped": r.stopped,
                }
                for r in self.runs
            ],
        }


def soft_threshold(values, threshold):
    """Classic sign-preserving shrinkage: sign(v) * max(|v| - t, 0)."""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def _prepare(X, Y, weights, bandwidths):
    weights = np.ascontiguousarray(np.asarray(weights, dtype=np.float64))
    bandwidths = np.asarray(bandwidths, dtype=np.float64)
    params = ArdKernelParams(np.abs(weights), bandwidths)
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    Y = np.ascontiguousarray(np.asarray(Y, dtype=np.float64))
    if X.shape[0] < 4 or Y.shape[0] < 4:
        raise SampleTooSmall(
            f"ratio objective needs >= 4 samples per side, got {X.shape[0]} and {Y.shape[0]}"
        )
    return X, Y, weights, bandwidths, params


class _Workspace:
    """Reusable buffers for one sample-size triple; the optimizer rotates two
    of these so last-accepted blocks survive while a trial point is tested."""

    __slots__ = ("Xs", "Ys", "Kxx", "Kyy", "Kxy")

    def __init__(self, n, m, D):
        self.Xs = np.empty((n, D))
        self.Ys = np.empty((m, D))
        self.Kxx = np.empty((n, n))
        self.Kyy = np.empty((m, m))
        self.Kxy = np.empty((n, m))


class _Eval:
    """Kernel blocks and statistics at one weight vector, reused between the
    objective value and the gradient so each iterate costs one kernel pass.

    Builds the blocks directly from scaled coordinates (skipping the public
    kernel_matrix wrapper) because the optimizer calls this hundreds of
    times per run; the within-sample diagonals are pinned to 1.0 exactly.
    """

    __slots__ = ("Kxx", "Kyy", "Kxy", "mmd_sq", "variance", "ratio", "smooth",
                 "_hxc", "_hyc")

    def __init__(self, X, Y, weights, bandwidths, ws=None):
        scaled = np.abs(weights) / (bandwidths * np.sqrt(weights.shape[0]))
        if ws is None:
            ws = _Workspace(X.shape[0], Y.shape[0], X.shape[1])
        np.multiply(X, scaled, out=ws.Xs)
        np.multiply(Y, scaled, out=ws.Ys)
        self.Kxx = _accel.kernel_matrix(ws.Xs, ws.Xs, out=ws.Kxx)
        self.Kyy = _accel.kernel_matrix(ws.Ys, ws.Ys, out=ws.Kyy)
        self.Kxy = _accel.kernel_matrix(ws.Xs, ws.Ys, out=ws.Kxy)
        np.fill_diagonal(self.Kxx, 1.0)
        np.fill_diagonal(self.Kyy, 1.0)
        self.mmd_sq, self.variance, self._hxc, self._hyc = _stats_from_blocks(
            self.Kxx, self.Kyy, self.Kxy
        )
        self.ratio = self.mmd_sq / np.sqrt(self.variance + STABILITY_C)
        self.smooth = -np.log(max(self.ratio, EPS_FLOOR))

    def grad(self, X, Y, weights, bandwidths):
        if self.ratio <= EPS_FLOOR:
            raise NonFiniteGradient(
                f"ratio {self.ratio:.3e} at or below the {EPS_FLOOR} floor"
            )
        n, m = X.shape[0], Y.shape[0]
        D = weights.shape[0]
        hxc = np.ascontiguousarray(self._hxc)
        hyc = np.ascontiguousarray(self._hyc)
        KxyT = np.ascontiguousarray(self.Kxy.T)

        # The squared differences are translation invariant per dimension;
        # centering on the pooled mean keeps the GEMM-based reductions from
        # cancellation noise (a constant dimension must yield exactly 0).
        mu = (X.sum(axis=0) + Y.sum(axis=0)) / (n + m)
        Xc = np.ascontiguousarray(X - mu)
        Yc = np.ascontiguousarray(Y - mu)

        wxx, wxx_h = _accel.sqdiff_sums_dual(self.Kxx, Xc, Xc, hxc)
        wyy, wyy_h = _accel.sqdiff_sums_dual(self.Kyy, Yc, Yc, hyc)
        wxy, wxy_h = _accel.sqdiff_sums_dual(self.Kxy, Xc, Yc, hxc)
        wxy_ht = _accel.sqdiff_sums_dual(KxyT, Yc, Xc, hyc)[1]

        c = 2.0 * weights / (D * bandwidths * bandwidths)
        d_mmd = -c * (wxx / (n * (n - 1)) + wyy / (m * (m - 1)) - 2.0 * wxy / (n * m))
        d_var = -c * (
            (8.0 / n**2) * (wxx_h / (n - 1) - wxy_h / m)
            + (8.0 / m**2) * (wyy_h / (m - 1) - wxy_ht / n)
        )
        return -d_mmd / self.mmd_sq + d_var / (2.0 * (self.variance + STABILITY_C))


def objective(weights, X, Y, bandwidths, lam):
    """Penalized negative-log-ratio objective value."""
    X, Y, weights, bandwidths, _ = _prepare(X, Y, weights, bandwidths)
    ev = _Eval(X, Y, weights, bandwidths)
    return float(ev.smooth + lam * np.abs(weights).sum())


def gradient(weights, X, Y, bandwidths):
    """Analytic gradient of the smooth part -log(ratio) w.r.t. each weight.

    Raises NonFiniteGradient when the ratio sits at the EPS_FLOOR boundary,
    where the floored objective is flat and the log-gradient undefined.
    """
    X, Y, weights, bandwidths, _ = _prepare(X, Y, weights, bandwidths)
    grad = _Eval(X, Y, weights, bandwidths).grad(X, Y, weights, bandwidths)
    if not np.all(np.isfinite(grad)):
        raise NonFiniteGradient("non-finite gradient component")
    return grad


def _init_weights(config, D):
    if config.init == "ones":
        return np.ones(D)
    return np.full(D, 1.0 / np.sqrt(D))


def optimize_one(X, Y, bandwidths, lam, config):
    """Proximal gradient descent for one lambda; returns (weights, diagnostics).

    The accepted objective sequence is non-increasing: a step is taken only
    if the penalized objective does not increase, with step-halving
    backtracking otherwise.  Convergence means the objective changed by
    less than ``config.tolerance``.
    """
    X, Y, _, bandwidths, _ = _prepare(X, Y, np.ones(X.shape[1]), bandwidths)
    n, m, D = X.shape[0], Y.shape[0], X.shape[1]
    ws_live, ws_trial = _Workspace(n, m, D), _Workspace(n, m, D)
    a = _init_weights(config, D)
    ev = _Eval(X, Y, a, bandwidths, ws=ws_live)
    obj = ev.smooth + lam * a.sum()
    trace = [obj]
    converged = False
    stopped = "max_iters"
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        try:
            grad = ev.grad(X, Y, a, bandwidths)
        except NonFiniteGradient:
            stopped = "ratio_floor"
            break
        step = config.step_size
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            trial = np.maximum(a - step * grad - step * lam, 0.0)
            trial_ev = _Eval(X, Y, trial, bandwidths, ws=ws_trial)
            trial_obj = trial_ev.smooth + lam * trial.sum()
            if trial_obj <= obj:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            stopped = "no_descent_step"
            break
        delta = obj - trial_obj
        a = trial
        obj = trial_obj
        ev = trial_ev
        ws_live, ws_trial = ws_trial, ws_live
        trace.append(obj)
        if delta < config.tolerance:
            converged = True
            stopped = "tolerance"
            break
    diagnostics = {
        "iterations": iterations,
        "converged": converged,
        "stopped": stopped,
        "final_objective": obj,
        "objective_trace": trace,
    }
    return a, diagnostics


def _fold_indices(rng, size, folds):
    return np.array_split(rng.permutation(size), folds)


def select_variables(X_train, Y_train, config, bandwidth_mode="median"):
    """Aggregate (lambda, fold) selections into a stable variable set.

    Bandwidths are computed once on the pooled training data and shared by
    every run.  Raises AllRunsRejected when no run achieves a positive
    validation ratio, which signals indistinguishable samples.
    """
    X = np.ascontiguousarray(np.asarray(X_train, dtype=np.float64))
    Y = np.ascontiguousarray(np.asarray(Y_train, dtype=np.float64))
    n, m = X.shape[0], Y.shape[0]
    K = config.cv_folds
    for size in (n, m):
        largest_fold = -(-size // K)
        if size // K < 4 or size - largest_fold < 4:
            raise SampleTooSmall(
                f"{K}-fold splits of {n}/{m} samples leave folds below the 4-sample minimum"
            )
    bandwidths = bandwidth_heuristic(X, Y, mode=bandwidth_mode)
    rng = np.random.default_rng(config.seed)
    x_folds = _fold_indices(rng, n, K)
    y_folds = _fold_indices(rng, m, K)

    D = X.shape[1]
    runs = []
    votes = np.zeros(D)
    for lam in config.lambda_grid:
        for fold in range(K):
            x_val, y_val = x_folds[fold], y_folds[fold]
            x_tr = np.setdiff1d(np.arange(n), x_val)
            y_tr = np.setdiff1d(np.arange(m), y_val)
            weights, diag = optimize_one(X[x_tr], Y[y_tr], bandwidths, lam, config)
            est = ratio_statistic(
                X[x_val], Y[y_val], ArdKernelParams(weights, bandwidths)
            )
            # a run that ended at the ratio floor returned an arbitrary
            # iterate, not an optimum; it may not vote even if the
            # validation fold happens to score positive
            kept = est.ratio > 0.0 and diag["stopped"] != "ratio_floor"
            selected_dims = tuple(int(d) for d in np.flatnonzero(weights > config.weight_cutoff))
            if kept:
                votes[list(selected_dims)] += 1.0
            runs.append(
                RunRecord(
                    lam=float(lam),
                    fold=fold,
                    weights=weights,
                    objective=diag["final_objective"],
                    validation_ratio=float(est.ratio),
                    kept=kept,
                    selected_dims=selected_dims,
                    converged=diag["converged"],
                    iterations=diag["iterations"],
                    stopped=diag["stopped"],
                )
            )
    if not any(r.kept for r in runs):
        raise AllRunsRejected(
            f"none of the {len(runs)} (lambda, fold) runs achieved a positive validation ratio"
        )
    stability = votes / len(runs)
    selected = tuple(int(d) for d in np.flatnonzero(stability >= config.selection_threshold))
    return SelectionResult(
        selected=selected,
        stability=stability,
        runs=tuple(runs),
        bandwidths=bandwidths,
    )
