"""Exception hierarchy shared by all rffnet modules."""


class RFFNetError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(RFFNetError, ValueError):
    """An argument violates a documented precondition (shape, range, domain)."""


class DataError(RFFNetError, ValueError):
    """Input data could not be parsed or contains invalid values."""


class NumericalError(RFFNetError, ArithmeticError):
    """A linear solve or other numerical routine failed its accuracy check."""


class TrainingError(RFFNetError, RuntimeError):
    """Training diverged. Carries the epoch and batch where it happened."""

    def __init__(self, message, epoch=None, batch=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class SerializationError(RFFNetError):
    """A model file is corrupt, truncated or written by an unknown format version."""


class MetricError(RFFNetError, ValueError):
    """A metric is undefined for the given labels (e.g. single-class AUC)."""


class UsageError(RFFNetError):
    """An operation was called on a model that does not support it."""
