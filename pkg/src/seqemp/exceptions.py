"""Exception types raised by the package."""


class DegenerateDataError(ValueError):
    """Data for which a statistic is undefined (zero variance, all-zero responses)."""


class CholeskyError(ValueError):
    """Covariance could not be factorized even at the largest jitter.

    Attributes
    ----------
    minor : int
        1-based order of the leading minor that failed.
    """

    def __init__(self, message, minor):
        super().__init__(message)
        self.minor = minor


class CsvFormatError(ValueError):
    """Malformed CSV input; ``line`` is the 1-based offending line."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
