"""Synthetic embedding corpora with known distribution shifts.

Each word v gets a stable baseline vector b_v; period t's row is

    row[v, t] = sqrt(stability) * b_v + sqrt(1 - stability) * noise[v, t] + mu_t

so the marginal distribution of every period is N(mu_t, I) regardless of
``stability``, which only controls how correlated a word's vectors are
across periods (0 = independent periods, ideal for permutation-null
calibration; near 1 = stable word identities, ideal for score tracing).

The per-period offset mu_t carries an optional linear trend (making every
period pair distinguishable) and a mean shift of ``magnitude`` on
``shift_dims`` at ``shift_period``, applied to all words or to a random
``shift_fraction`` of them.  The ground truth (shifted dimensions, period,
and words) is returned alongside and written as ``truth.json``.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingSnapshot

__all__ = ["SynthSpec", "generate_corpus", "write_corpus"]


@dataclass(frozen=True)
class SynthSpec:
    n_periods: int
    dim: int
    n_words: int
    seed: int = 0
    magnitude: float = 0.0
    shift_dims: tuple = ()
    shift_period: int | None = None
    shift_fraction: float = 1.0
    stability: float = 0.0
    trend_dims: tuple = ()
    trend_step: float = 0.0

    def __post_init__(self):
        if self.n_periods < 2 or self.dim < 1 or self.n_words < 2:
            raise ValueError("need n_periods >= 2, dim >= 1, n_words >= 2")
        if not 0.0 <= self.stability <= 1.0:
            raise ValueError("stability must be in [0, 1]")
        if not 0.0 < self.shift_fraction <= 1.0:
            raise ValueError("shift_fraction must be in (0, 1]")
        dims = tuple(int(d) for d in self.shift_dims)
        if any(d < 0 or d >= self.dim for d in dims):
            raise ValueError(f"shift_dims out of range for dim {self.dim}")
        object.__setattr__(self, "shift_dims", dims)
        tdims = tuple(int(d) for d in self.trend_dims)
        if any(d < 0 or d >= self.dim for d in tdims):
            raise ValueError(f"trend_dims out of range for dim {self.dim}")
        object.__setattr__(self, "trend_dims", tdims)
        period = self.shift_period
        if period is None:
            period = self.n_periods - 1
        if not 0 <= period < self.n_periods:
            raise ValueError(f"shift_period {period} out of range")
        object.__setattr__(self, "shift_period", int(period))

    def period_label(self, t):
        return f"p{t:03d}"

    def word(self, v):
        return f"w{v:05d}"


def generate_corpus(spec):
    """Generate snapshots plus a ground-truth dict, deterministically."""
    rng = np.random.default_rng(spec.seed)
    base = rng.normal(0.0, 1.0, (spec.n_words, spec.dim))
    n_shifted = max(1, round(spec.shift_fraction * spec.n_words))
    if spec.magnitude != 0.0 and spec.shift_dims:
        shifted_idx = np.sort(rng.choice(spec.n_words, size=n_shifted, replace=False))
    else:
        shifted_idx = np.empty(0, dtype=np.int64)
    s = np.sqrt(spec.stability)
    t_noise = np.sqrt(1.0 - spec.stability)
    words = tuple(spec.word(v) for v in range(spec.n_words))
    snapshots = []
    for t in range(spec.n_periods):
        noise = rng.normal(0.0, 1.0, (spec.n_words, spec.dim))
        rows = s * base + t_noise * noise
        if spec.trend_dims and spec.trend_step != 0.0:
            rows[:, list(spec.trend_dims)] += spec.trend_step * t
        if t == spec.shift_period and shifted_idx.size:
            rows[np.ix_(shifted_idx, list(spec.shift_dims))] += spec.magnitude
        snapshots.append(EmbeddingSnapshot(spec.period_label(t), words, rows))
    truth = {
        "n_periods": spec.n_periods,
        "dim": spec.dim,
        "n_words": spec.n_words,
        "seed": spec.seed,
        "magnitude": spec.magnitude,
        "shift_dims": list(spec.shift_dims),
        "shift_period": spec.shift_period,
        "shift_fraction": spec.shift_fraction,
        "stability": spec.stability,
        "trend_dims": list(spec.trend_dims),
        "trend_step": spec.trend_step,
        "period_labels": [spec.period_label(t) for t in range(spec.n_periods)],
        "shifted_words": [words[v] for v in shifted_idx.tolist()],
    }
    return snapshots, truth


def write_corpus(spec, out_dir):
    """Write per-period word2vec-text files and truth.json; byte-stable."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshots, truth = generate_corpus(spec)
    paths = []
    for snap in snapshots:
        path = out_dir / f"{snap.period_label}.vec"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{len(snap.vocab)} {snap.dim}\n")
            for word, row in zip(snap.vocab, snap.matrix):
                fh.write(word + " " + " ".join(repr(float(v)) for v in row) + "\n")
        paths.append(path)
    truth_path = out_dir / "truth.json"
    with open(truth_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths, truth_path
