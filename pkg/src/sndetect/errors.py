"""Typed errors shared by every module in the package."""


class SnDetectError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedLanguage(SnDetectError):
    """The requested or detected language is not one of es/ca/fr."""


class EmptyCorpus(SnDetectError):
    """A training corpus contained no documents."""


class DegenerateLabels(SnDetectError):
    """Classifier training needs at least two distinct labels."""


class AlignmentError(SnDetectError):
    """External annotations do not line up with the token stream."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class FormatError(SnDetectError):
    """A vector or lexicon file violates its documented format."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class KeyNotFound(SnDetectError):
    """An embedding key is absent from the store (an expected outcome)."""


class NoSubwordCoverage(SnDetectError):
    """No character n-gram of the token has a stored vector."""


class EmptyGraph(SnDetectError):
    """Ranking was requested on a graph with no nodes."""


class CsvFormatError(SnDetectError):
    """A CSV input violates its documented schema."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class SchemaError(SnDetectError):
    """A persisted model file is structurally invalid or corrupted."""


class VersionMismatch(SnDetectError):
    """A persisted model file carries an unknown version tag."""


class UnknownLabel(SnDetectError):
    """A label outside the declared class inventory was seen."""


class EmptyMatrix(SnDetectError):
    """Metrics were requested on a confusion matrix with zero total."""


class TooFewSamples(SnDetectError):
    """Not enough documents for the requested split or fold count."""


class ModelMissing(SnDetectError):
    """No fitted topic model is available for the resolved language."""
