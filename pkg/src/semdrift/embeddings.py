"""Loading, validating, aligning, and splitting per-period embedding snapshots.

Supported file formats:

* word2vec text: optional first header line ``count dim``, then one line per
  word: ``token v1 v2 ... vD`` separated by single spaces.  UTF-8.
* TSV: ``token<TAB>v1<TAB>...<TAB>vD``.

Alignment intersects the vocabularies of all periods (words missing from
any period are dropped with a logged warning) and orders the shared
vocabulary lexicographically so downstream sampling is reproducible.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySharedVocab,
    InsufficientVocab,
    ParseError,
    ValidationError,
    WordNotFound,
)

__all__ = [
    "EmbeddingSnapshot",
    "AlignedCorpus",
    "VocabSplit",
    "load_snapshot",
    "align",
    "split_vocab",
]

logger = logging.getLogger("semdrift.embeddings")


@dataclass(frozen=True)
class EmbeddingSnapshot:
    """One period's word vectors, in file row order."""

    period_label: str
    vocab: tuple
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValidationError(f"{self.period_label}: matrix must be 2-D")
        if len(self.vocab) != matrix.shape[0]:
            raise ValidationError(
                f"{self.period_label}: {len(self.vocab)} words vs {matrix.shape[0]} rows"
            )
        if matrix.shape[0] < 2:
            raise ValidationError(f"{self.period_label}: need at least 2 words")
        if not np.all(np.isfinite(matrix)):
            raise ValidationError(f"{self.period_label}: non-finite coordinate")
        if len(set(self.vocab)) != len(self.vocab):
            dupes = sorted({w for w in self.vocab if self.vocab.count(w) > 1})
            raise ValidationError(f"{self.period_label}: duplicate words {dupes[:5]}")
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self):
        return self.matrix.shape[1]

    def row_index(self):
        return {w: i for i, w in enumerate(self.vocab)}


@dataclass(frozen=True)
class AlignedCorpus:
    """Snapshots for T periods plus their sorted shared vocabulary."""

    periods: tuple
    shared_vocab: tuple

    @property
    def n_periods(self):
        return len(self.periods)

    @property
    def dim(self):
        return self.periods[0].dim

    @property
    def period_labels(self):
        return tuple(s.period_label for s in self.periods)

    def rows(self, period_idx, words):
        """Matrix of the given words' vectors in one period, in word order."""
        snap = self.periods[period_idx]
        index = snap.row_index()
        try:
            idx = [index[w] for w in words]
        except KeyError as exc:
            raise WordNotFound(f"{exc.args[0]!r} not in period {snap.period_label}") from None
        return snap.matrix[idx]


@dataclass(frozen=True)
class VocabSplit:
    train_words: tuple
    test_words: tuple
    seed: int

    def __post_init__(self):
        if set(self.train_words) & set(self.test_words):
            raise ValidationError("train and test words overlap")
        object.__setattr__(self, "train_words", tuple(self.train_words))
        object.__setattr__(self, "test_words", tuple(self.test_words))


def _parse_line(line, sep, lineno, path):
    parts = line.rstrip("\n").split(sep)
    if len(parts) < 2:
        raise ParseError(f"{path}:{lineno}: expected token and coordinates")
    token = parts[0]
    try:
        values = [float(p) for p in parts[1:]]
    except ValueError as exc:
        raise ParseError(f"{path}:{lineno}: bad coordinate ({exc})") from None
    return token, values


def load_snapshot(path, fmt="word2vec_text", period_label=None):
    """Parse one embedding file into a validated snapshot.

    Row order follows file order.  ``fmt`` is ``word2vec_text`` or ``tsv``.
    """
    if fmt not in ("word2vec_text", "tsv"):
        raise ValueError(f"unknown format {fmt!r}")
    sep = " " if fmt == "word2vec_text" else "\t"
    path = str(path)
    if period_label is None:
        period_label = path.rsplit("/", 1)[-1].rsplit(".", 1)[0]

    words = []
    rows = []
    declared = None
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 0
    if fmt == "word2vec_text" and lines:
        head = lines[0].split()
        if len(head) == 2:
            try:
                declared = (int(head[0]), int(head[1]))
                start = 1
            except ValueError:
                declared = None
    dim = declared[1] if declared else None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        token, values = _parse_line(line, sep, lineno, path)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ParseError(
                f"{path}:{lineno}: {len(values)} coordinates, expected {dim}"
            )
        words.append(token)
        rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no embedding rows")
    if declared and declared[0] != len(words):
        raise ParseError(f"{path}: header declares {declared[0]} rows, found {len(words)}")
    return EmbeddingSnapshot(period_label, tuple(words), np.array(rows, dtype=np.float64))


def align(snapshots):
    """Intersect vocabularies across all snapshots into an AlignedCorpus."""
    snapshots = tuple(snapshots)
    if len(snapshots) < 2:
        raise ValidationError("alignment needs at least 2 snapshots")
    dims = {s.dim for s in snapshots}
    if len(dims) > 1:
        raise DimensionMismatch(f"snapshots disagree on dimension: {sorted(dims)}")
    shared = set(snapshots[0].vocab)
    for snap in snapshots[1:]:
        shared &= set(snap.vocab)
    if not shared:
        raise EmptySharedVocab("no word appears in every period")
    dropped = max(len(s.vocab) for s in snapshots) - len(shared)
    if dropped:
        logger.warning("dropped up to %d words missing from some period", dropped)
    return AlignedCorpus(periods=snapshots, shared_vocab=tuple(sorted(shared)))


def split_vocab(corpus, n_train, n_test, seed):
    """Disjoint uniform-random train/test word sets, reproducible by seed."""
    vocab = corpus.shared_vocab
    if n_train + n_test > len(vocab):
        raise InsufficientVocab(
            f"requested {n_train}+{n_test} words from a shared vocabulary of {len(vocab)}"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(vocab))
    train = tuple(sorted(vocab[i] for i in perm[:n_train]))
    test = tuple(sorted(vocab[i] for i in perm[n_train:n_train + n_test]))
    return VocabSplit(train_words=train, test_words=test, seed=seed)
