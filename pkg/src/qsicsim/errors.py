"""Exception types shared across the package."""

from __future__ import annotations


class QsicError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(QsicError):
    """A ray was requested for the all-zero vector."""


class DimensionMismatch(QsicError):
    """Operands live in different Hilbert-space dimensions."""


class ZeroProbabilityBranch(QsicError):
    """A post-measurement state was requested for an outcome of probability zero."""


class ParseError(QsicError):
    """A definition file is syntactically malformed.

    The message carries location information (line/column or JSON path).
    """


class ValidationError(QsicError):
    """A parsed or constructed object violates a structural invariant."""


class ResourceLimit(QsicError):
    """A configured cap (support size, state count, pair count) was exceeded."""


class Truncated(QsicError):
    """The operation needs a closed machine but got a depth-truncated one."""


class NonUniqueStationary(QsicError):
    """The transition chain has several closed communicating classes.

    ``solutions`` holds one exact stationary distribution per closed class.
    """

    def __init__(self, message: str, solutions=()):
        super().__init__(message)
        self.solutions = tuple(solutions)


class TruncationExceeded(QsicError):
    """A classical run walked past the built depth of a truncated machine."""


class InsufficientData(QsicError):
    """No comparison context reached the minimum occurrence count in both traces."""
