"""Kernel two-sample variable selection and word scoring over embedding snapshots."""

from ._accel import BACKEND
from .analysis import (
    PairAnalysis,
    PermutationConfig,
    ScoreTable,
    WordScoreSeries,
    analyze_all_pairs,
    cosine_distance_term,
    global_time_score,
    heatmap_matrices,
    rank_words,
    score_series,
    score_table,
)
from .embeddings import (
    AlignedCorpus,
    EmbeddingSnapshot,
    VocabSplit,
    align,
    load_snapshot,
    split_vocab,
)
from .permutation import PermutationTestResult, permutation_test
from .synth import SynthSpec, generate_corpus, write_corpus
from .errors import (
    AllRunsRejected,
    DegenerateDimensionWarning,
    DimensionMismatch,
    EmptySelection,
    EmptySharedVocab,
    InsufficientVocab,
    NonFiniteGradient,
    ParseError,
    SampleTooSmall,
    SemdriftError,
    ValidationError,
    WordNotFound,
    ZeroNormSubvectorWarning,
)
from .kernel import ArdKernelParams, bandwidth_heuristic, kernel_matrix, kernel_value
from .mmd import STABILITY_C, MmdEstimate, mmd_unbiased, mmd_variance, ratio_statistic
from .selection import (
    EPS_FLOOR,
    OptimizerConfig,
    SelectionResult,
    gradient,
    objective,
    optimize_one,
    select_variables,
    soft_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "STABILITY_C",
    "EPS_FLOOR",
    "AlignedCorpus",
    "ArdKernelParams",
    "EmbeddingSnapshot",
    "MmdEstimate",
    "OptimizerConfig",
    "PairAnalysis",
    "PermutationConfig",
    "PermutationTestResult",
    "ScoreTable",
    "SelectionResult",
    "SynthSpec",
    "VocabSplit",
    "WordScoreSeries",
    "align",
    "analyze_all_pairs",
    "cosine_distance_term",
    "generate_corpus",
    "global_time_score",
    "heatmap_matrices",
    "load_snapshot",
    "permutation_test",
    "rank_words",
    "score_series",
    "score_table",
    "split_vocab",
    "write_corpus",
    "bandwidth_heuristic",
    "kernel_matrix",
    "kernel_value",
    "mmd_unbiased",
    "mmd_variance",
    "ratio_statistic",
    "objective",
    "gradient",
    "optimize_one",
    "select_variables",
    "soft_threshold",
    "SemdriftError",
    "ParseError",
    "ValidationError",
    "DimensionMismatch",
    "EmptySharedVocab",
    "InsufficientVocab",
    "SampleTooSmall",
    "NonFiniteGradient",
    "AllRunsRejected",
    "EmptySelection",
    "WordNotFound",
    "DegenerateDimensionWarning",
    "ZeroNormSubvectorWarning",
]
