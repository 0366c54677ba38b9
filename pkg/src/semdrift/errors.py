"""Exception and warning types shared across the package."""


class SemdriftError(Exception):
    """Base class for all semdrift errors."""


class ParseError(SemdriftError):
    """An embedding file is malformed (bad line, inconsistent dimension)."""


class ValidationError(SemdriftError):
    """Parsed data violates a snapshot invariant (NaN/Inf, duplicate word)."""


class DimensionMismatch(SemdriftError):
    """Inputs that must share a dimension do not."""


class EmptySharedVocab(SemdriftError):
    """Snapshot alignment produced an empty vocabulary intersection."""


class InsufficientVocab(SemdriftError):
    """The shared vocabulary is too small for the requested split."""


class SampleTooSmall(SemdriftError):
    """A statistic was requested on fewer samples than its estimator needs."""


class NonFiniteGradient(SemdriftError):
    """The ratio statistic sits at its floor, so the log-gradient is undefined."""


class AllRunsRejected(SemdriftError):
    """No (lambda, fold) run achieved a positive validation ratio."""


class EmptySelection(SemdriftError):
    """A permutation test was requested with an empty variable set."""


class WordNotFound(SemdriftError):
    """A word is not present in the shared vocabulary."""


class DegenerateDimensionWarning(UserWarning):
    """A pooled dimension is constant; its bandwidth fell back to 1.0."""


class ZeroNormSubvectorWarning(UserWarning):
    """A selected-coordinate subvector had zero norm; its cosine term is 1.0."""
