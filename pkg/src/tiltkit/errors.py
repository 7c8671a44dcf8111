"""Exception hierarchy shared by every tiltkit module."""

from __future__ import annotations


class TiltkitError(Exception):
    """Base class for all library errors."""


class ParseError(TiltkitError):
    pass


class BadParameter(TiltkitError):
    pass


class CtxMismatch(TiltkitError):
    pass


class NoPreimage(TiltkitError):
    pass


class NotInvertible(TiltkitError):
    pass


class TooLarge(TiltkitError):
    """Raised when an exhaustive check would exceed the enumeration cap."""

    def __init__(self, message: str, size: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class Incompatible(TiltkitError):
    """A sequence fails the relation a_{n+1}^p == a_n.

    ``index`` is the first n for which the relation fails and ``valuation`` is
    the p-adic valuation of the defect a_{n+1}^p - a_n.
    """

    def __init__(self, message: str, index: int, valuation: int):
        super().__init__(message)
        self.index = index
        self.valuation = valuation


class NotCauchy(TiltkitError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class InsufficientDepth(TiltkitError):
    def __init__(self, message: str, max_achievable: int):
        super().__init__(message)
        self.max_achievable = max_achievable


class NotInImage(TiltkitError):
    pass


class BadElement(TiltkitError):
    pass


class HypothesisFail(TiltkitError):
    pass


class UnsupportedRank(TiltkitError):
    pass


class UnknownDemo(TiltkitError):
    pass
