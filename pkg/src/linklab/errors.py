"""Exception types shared across the linklab pipeline."""


class LinkLabError(Exception):
    """Base class for all linklab errors."""


class MalformedRecord(LinkLabError):
    """A JSONL record is not valid JSON or misses a required field."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SelfLink(LinkLabError):
    """A link whose two endpoints are the same issue."""


class RepoTooSmall(LinkLabError):
    """Repository has too few links for a stratified dataset."""


class InsufficientCandidates(LinkLabError):
    """Not enough eligible unlinked issue pairs to sample the requested negatives."""


class StratificationImpossible(LinkLabError):
    """A class has too few examples to be split or folded."""


class DegenerateTraining(LinkLabError):
    """Training data contains a single class."""


class DimensionMismatch(LinkLabError):
    """Feature vector dimensionality does not match the trained model."""


class EmptyCorpus(LinkLabError):
    """TF-IDF fit called with zero documents."""


class EmptyPredictions(LinkLabError):
    """Evaluation called with zero predictions."""


class UnknownLabel(LinkLabError):
    """A prediction refers to a label outside the declared universe."""


class MissingScores(LinkLabError):
    """Top-k analysis requested but scores are absent."""


class SchemaError(LinkLabError):
    """A prediction file violates its schema or internal invariants."""


class CoverageError(LinkLabError):
    """A prediction file does not cover the test split exactly once."""


class ConstantSeries(LinkLabError):
    """Correlation requested over a series with zero variance."""


class LengthMismatch(LinkLabError):
    """Correlation inputs differ in length or are too short."""
