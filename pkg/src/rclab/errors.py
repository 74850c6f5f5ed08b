"""Exception hierarchy shared by every module."""


class RCLabError(Exception):
    """Base class for all library errors."""


class DimensionError(RCLabError, ValueError):
    """Raised when point, set or subspace dimensions do not match."""


class ValidationError(RCLabError, ValueError):
    """Raised for malformed inputs; the message names the offending field."""


class UnsupportedError(RCLabError, ValueError):
    """Raised when an input is valid but outside what an operation handles."""


class NonConvergenceError(RCLabError):
    """Raised when the minimax solver cannot certify its radius.

    The best iterate found so far is kept on ``best`` (a ``CenterSolution``)
    together with the certified ``gap`` between it and the lower bound.
    """

    def __init__(self, message, best=None, gap=None):
        super().__init__(message)
        self.best = best
        self.gap = gap
