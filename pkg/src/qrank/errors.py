"""Exception hierarchy shared by all qrank modules."""

from __future__ import annotations


class QRankError(Exception):
    """Base class for every error raised by qrank."""


class ValidationError(QRankError, ValueError):
    """An input violated a documented precondition or type invariant."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonUniquenessError(QRankError):
    """The requested fixed point is not unique.

    ``kernel_dimension`` is the dimension of the solution space and
    ``states`` (possibly empty) holds representative solutions.
    """

    def __init__(self, message: str, kernel_dimension: int, states=()):
        super().__init__(message)
        self.kernel_dimension = kernel_dimension
        self.states = list(states)


class NumericalInstabilityError(QRankError):
    """Integration drifted outside the physical state space."""


class InvalidStateError(QRankError):
    """A state failed validation where a valid one was required."""


class SizeCapError(QRankError):
    """Dense superoperator work was requested beyond the configured size cap."""


class StructuralError(QRankError):
    """A mathematical guarantee failed to hold; indicates a bug or corrupt input."""


class BoundaryContaminationError(QRankError):
    """Probability reached the lattice edge, so the spread fit is unreliable."""
