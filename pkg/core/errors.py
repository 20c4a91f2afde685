"""
Exception hierarchy for the certifier.

All errors derive from SeparabilityError, itself a ValueError, so callers
that only know about ValueError keep working.
"""
from typing import Optional


class SeparabilityError(ValueError):
    """Base class for every error raised by the library."""


class NegativeWeightError(SeparabilityError):
    pass


class BadNormalizationError(SeparabilityError):
    pass


class BadIndexError(SeparabilityError):
    pass


class NotSymmetricError(SeparabilityError):
    pass


class DimensionMismatchError(SeparabilityError):
    pass


class RankTooHighError(SeparabilityError):
    pass


class NotDnnError(SeparabilityError):
    pass


class NumericalDegeneracyError(SeparabilityError):
    pass


class UNotInRangeError(SeparabilityError):
    """The all-ones direction lies outside the range of M."""


class UxNotInRangeError(SeparabilityError):
    """The weighted direction u_x lies outside the range of M."""


class InfeasibleError(SeparabilityError):
    """Lower bound exceeds upper bound; both are kept for reporting."""

    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class DimensionTooSmallError(SeparabilityError):
    pass


class PreconditionError(SeparabilityError):
    pass


class BadSubsetError(SeparabilityError):
    pass


class SupportBudgetExceededError(SeparabilityError):
    pass


class BadParamError(SeparabilityError):
    pass


class BadCutError(SeparabilityError):
    pass


class AllZeroError(SeparabilityError):
    pass


class NotCertifiedError(SeparabilityError):
    pass


class StateFileError(SeparabilityError):
    """Malformed state file; location names the line or field."""

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
