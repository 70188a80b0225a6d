"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ConvIsdError(Exception):
    """Base class for every error raised by this package."""


class NoSolution(ConvIsdError):
    """The linear system has no solution."""


class IndexOutOfRange(ConvIsdError, IndexError):
    pass


class SizeMismatch(ConvIsdError, ValueError):
    pass


class DimensionMismatch(ConvIsdError, ValueError):
    pass


class NotSquare(ConvIsdError, ValueError):
    pass


class RankDeficient(ConvIsdError, ValueError):
    pass


class NotLeftPrime(ConvIsdError, ValueError):
    pass


class NoParityCheck(ConvIsdError):
    pass


class TooLarge(ConvIsdError):
    """An enumeration would exceed the configured budget."""


class WeightTooLarge(ConvIsdError, ValueError):
    """Weight exceeds N - K, so no information set can avoid the error."""


class NotDelayFree(ConvIsdError):
    pass


class NotInCode(ConvIsdError):
    pass


class InconsistentSpec(ConvIsdError, ValueError):
    pass


class NonPositiveInput(ConvIsdError, ValueError):
    pass
