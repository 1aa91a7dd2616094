"""Exception types raised across the package."""


class NNetEnError(Exception):
    """Base class for all package errors."""


class FormatError(NNetEnError):
    """A data file does not match its expected binary/CSV layout."""


class ConsistencyError(NNetEnError):
    """Two files that must agree (e.g. images vs. labels) do not."""


class ParseError(NNetEnError):
    """A cell of a text file could not be parsed."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DomainError(NNetEnError):
    """An argument lies outside its documented domain."""


class ShapeError(NNetEnError):
    """Array dimensions do not match."""


class SeriesLengthError(DomainError):
    """Time series is empty or longer than the reservoir can hold."""


class ConfigurationError(NNetEnError):
    """Unknown dataset id or otherwise invalid configuration."""


class TrainingDivergedError(NNetEnError):
    """Classifier weights became non-finite during training."""


class ConvergenceError(NNetEnError):
    """Iterative optimisation hit its iteration cap before converging."""


class UndefinedEntropyError(NNetEnError):
    """Entropy is undefined for this input (no matching templates)."""
