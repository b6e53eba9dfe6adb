"""Exception types raised across the package."""


class FtsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGrid(FtsError):
    """Grid construction arguments are unusable (e.g. fewer than 2 points)."""


class GridMismatch(FtsError):
    """Two curves or samples do not live on the same grid."""


class LengthMismatch(FtsError):
    """Two samples do not contain the same number of curves."""


class InvalidHorizon(FtsError):
    """Lag horizon H is below 1."""


class HorizonTooLarge(InvalidHorizon):
    """Lag horizon H is not smaller than the sample size."""


class DegenerateVariance(FtsError):
    """Estimated scale is at or below the degeneracy floor; the normalized
    statistic is undefined (typically constant or near-constant input)."""


class NonStationaryKernel(FtsError):
    """Autoregression kernel has Hilbert-Schmidt norm >= 1; the recursion
    has no stationary solution."""


class AlignmentError(FtsError):
    """Samples to be compared pairwise disagree in length or grid."""


class ParseError(FtsError):
    """Malformed input data; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidPrice(ParseError):
    """A price field is not a strictly positive number."""


class DaySkipped(FtsError):
    """A trading day has too few observations to form a curve."""
