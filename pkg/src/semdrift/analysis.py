"""Pairwise pipeline orchestration and global-time word scoring.

For every unordered period pair (t, t'), the train-word rows of the two
periods feed variable selection, and the held-out test-word rows feed the
permutation test restricted to the selected set.  A word's global-time
score at period t is the average, over the other T - 1 periods, of the
cosine distance between its selected-coordinate subvectors:

    score(v, t) = mean_{t' != t} [1 - cos(e[v,t][S], e[v,t'][S])]   in [0, 2]

Pairs with an empty selection contribute no term and shrink the average's
denominator; a period whose every pair is empty gets an undefined score
(None), which is distinct from 0.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import AllRunsRejected, EmptySelection, SemdriftError, WordNotFound, ZeroNormSubvectorWarning
from .permutation import permutation_test
from .selection import select_variables

__all__ = [
    "PairAnalysis",
    "PermutationConfig",
    "WordScoreSeries",
    "ScoreTable",
    "analyze_all_pairs",
    "cosine_distance_term",
    "score_table",
    "global_time_score",
    "rank_words",
    "score_series",
    "heatmap_matrices",
]


@dataclass(frozen=True)
class PermutationConfig:
    n_permutations: int = 500


@dataclass(frozen=True)
class PairAnalysis:
    """Selection and test outcome for one unordered period pair (a < b)."""

    period_a: str
    period_b: str
    index_a: int
    index_b: int
    selected_vars: tuple
    p_value: float | None
    n_train: int
    n_test: int
    diagnostics: dict
    error: str | None = None

    @property
    def n_selected(self):
        return len(self.selected_vars)

    def to_json_dict(self):
        return {
            "period_a": self.period_a,
            "period_b": self.period_b,
            "selected_vars": list(self.selected_vars),
            "n_selected": self.n_selected,
            "p_value": self.p_value,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "diagnostics": self.diagnostics,
            "error": self.error,
        }


@dataclass(frozen=True)
class WordScoreSeries:
    word: str
    scores: dict


def _pair_seed(seed, index_a, index_b, purpose):
    ss = np.random.SeedSequence(entropy=(int(seed), index_a, index_b, purpose))
    return int(ss.generate_state(1)[0])


def _analyze_pair(payload):
    (index_a, index_b, label_a, label_b, X_tr, Y_tr, X_te, Y_te,
     opt_config, n_permutations, seed) = payload
    diagnostics = {}
    selected = ()
    p_value = None
    error = None
    try:
        sel_config = replace(opt_config, seed=_pair_seed(seed, index_a, index_b, 0))
        result = select_variables(X_tr, Y_tr, sel_config)
        selected = result.selected
        kept = sum(r.kept for r in result.runs)
        diagnostics = {
            "n_runs": len(result.runs),
            "n_kept": kept,
            "converged_runs": sum(r.converged for r in result.runs),
            "max_stability": float(result.stability.max()),
        }
        if selected:
            test = permutation_test(
                X_te, Y_te, selected,
                n_permutations=n_permutations,
                seed=_pair_seed(seed, index_a, index_b, 1),
            )
            p_value = test.p_value
            diagnostics["observed_stat"] = test.observed_stat
    except AllRunsRejected:
        diagnostics["all_runs_rejected"] = True
    except EmptySelection:
        pass
    except SemdriftError as exc:
        error = f"{type(exc).__name__}: {exc}"
    return PairAnalysis(
        period_a=label_a,
        period_b=label_b,
        index_a=index_a,
        index_b=index_b,
        selected_vars=selected,
        p_value=p_value,
        n_train=X_tr.shape[0],
        n_test=X_te.shape[0],
        diagnostics=diagnostics,
        error=error,
    )


def analyze_all_pairs(corpus, split, optimizer_config, test_config=None, seed=0, jobs=1):
    """Run selection + permutation test for all C(T, 2) period pairs.

    Pair-level failures are recorded on the pair record instead of
    aborting the remaining pairs.  Results are deterministic for a fixed
    seed and independent of ``jobs``.
    """
    if test_config is None:
        test_config = PermutationConfig()
    T = corpus.n_periods
    labels = corpus.period_labels
    payloads = []
    for a in range(T):
        X_tr = corpus.rows(a, split.train_words)
        X_te = corpus.rows(a, split.test_words)
        for b in range(a + 1, T):
            payloads.append((
                a, b, labels[a], labels[b],
                X_tr, corpus.rows(b, split.train_words),
                X_te, corpus.rows(b, split.test_words),
                optimizer_config, test_config.n_permutations, seed,
            ))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_pair, payloads))
    else:
        results = [_analyze_pair(p) for p in payloads]
    return sorted(results, key=lambda r: (r.index_a, r.index_b))


def cosine_distance_term(u, v):
    """1 - cosine similarity, in [0, 2]; zero-norm inputs map to 1.0."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape or u.size == 0:
        raise ValueError(f"vectors must share a nonzero length, got {u.shape} and {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        warnings.warn("zero-norm subvector in cosine term, using neutral 1.0",
                      ZeroNormSubvectorWarning, stacklevel=2)
        return 1.0
    if np.array_equal(u, v):
        return 0.0
    cos = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return float(1.0 - cos)


def _pair_terms(U, V):
    """Vectorized cosine-distance terms between matching rows of U and V."""
    nu = np.linalg.norm(U, axis=1)
    nv = np.linalg.norm(V, axis=1)
    zero = (nu == 0.0) | (nv == 0.0)
    denom = np.where(zero, 1.0, nu * nv)
    cos = np.clip((U * V).sum(axis=1) / denom, -1.0, 1.0)
    terms = 1.0 - cos
    terms[zero] = 1.0
    terms[np.all(U == V, axis=1) & ~zero] = 0.0
    return terms, int(zero.sum())


@dataclass(frozen=True)
class ScoreTable:
    """Global-time scores for a word set: one row per period, NaN = undefined."""

    words: tuple
    period_labels: tuple
    matrix: np.ndarray

    def score(self, word, period_label):
        try:
            w = self.words.index(word)
        except ValueError:
            raise WordNotFound(f"{word!r} has no computed score") from None
        t = self.period_labels.index(period_label)
        value = self.matrix[t, w]
        return None if np.isnan(value) else float(value)


def score_table(corpus, pair_results, words=None):
    """Average per-pair cosine terms into per-(period, word) scores."""
    if words is None:
        words = corpus.shared_vocab
    words = tuple(words)
    labels = corpus.period_labels
    T = corpus.n_periods
    sums = np.zeros((T, len(words)))
    counts = np.zeros((T, len(words)))
    zero_norm = 0
    cache = {}
    for pair in pair_results:
        if pair.error or not pair.selected_vars:
            continue
        sel = list(pair.selected_vars)
        a, b = pair.index_a, pair.index_b
        for t in (a, b):
            if t not in cache:
                cache[t] = corpus.rows(t, words)
        terms, nz = _pair_terms(cache[a][:, sel], cache[b][:, sel])
        zero_norm += nz
        sums[a] += terms
        counts[a] += 1.0
        sums[b] += terms
        counts[b] += 1.0
    if zero_norm:
        warnings.warn(
            f"{zero_norm} zero-norm subvector terms mapped to the neutral 1.0",
            ZeroNormSubvectorWarning, stacklevel=2,
        )
    with np.errstate(invalid="ignore"):
        matrix = np.where(counts > 0, sums / np.where(counts > 0, counts, 1.0), np.nan)
    return ScoreTable(words=words, period_labels=labels, matrix=matrix)


def global_time_score(word, period_label, pair_results, corpus):
    """Score of one word at one period; None when every pair is empty."""
    if word not in corpus.shared_vocab:
        raise WordNotFound(f"{word!r} not in the shared vocabulary")
    table = score_table(corpus, pair_results, words=(word,))
    return table.score(word, period_label)


def rank_words(table, period_label, k):
    """Top-k (word, score) at one period, score descending, ties by word."""
    t = table.period_labels.index(period_label)
    scored = [
        (w, float(s))
        for w, s in zip(table.words, table.matrix[t])
        if not np.isnan(s)
    ]
    scored.sort(key=lambda ws: (-ws[1], ws[0]))
    return scored[:k]


def score_series(table, word):
    """Per-period score sequence for one word (None where undefined)."""
    if word not in table.words:
        raise WordNotFound(f"{word!r} has no computed score")
    w = table.words.index(word)
    scores = {
        label: (None if np.isnan(v) else float(v))
        for label, v in zip(table.period_labels, table.matrix[:, w])
    }
    return WordScoreSeries(word=word, scores=scores)


def heatmap_matrices(pair_results, labels):
    """T x T selected-count and p-value matrices (None on the diagonal and
    for undefined p-values); the lower triangle mirrors the upper."""
    T = len(labels)
    counts = [[None] * T for _ in range(T)]
    pvals = [[None] * T for _ in range(T)]
    for pair in pair_results:
        a, b = pair.index_a, pair.index_b
        counts[a][b] = counts[b][a] = pair.n_selected
        pvals[a][b] = pvals[b][a] = pair.p_value
    return counts, pvals
