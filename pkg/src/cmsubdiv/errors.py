"""Exception hierarchy.

Every error carries a ``context`` dict so the CLI can emit structured messages
(operation name, failing index, level, ...).
"""

from __future__ import annotations


class SubdivisionError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), **self.context}


class DomainError(SubdivisionError, ValueError):
    """Argument outside the domain of an operation (parameter, dimension, ...)."""


class ContractError(SubdivisionError, ValueError):
    """Operation called on an object that does not satisfy its precondition."""


class UndefinedDeltaError(ContractError):
    """delta() of a sequence with fewer than two elements."""


class CapabilityError(ContractError):
    """The space lacks a capability the operation needs (e.g. Euclidean embedding)."""


class NumericalError(SubdivisionError, ArithmeticError):
    """Base class for failures of a numerical construction."""


class GeodesicError(NumericalError):
    """Geodesic between two sphere points is not unique (antipodal inputs)."""


class DegenerateTangentError(NumericalError):
    """Bezier derivative vanishes, so no tangent direction exists."""


class InsufficientDataError(SubdivisionError, ValueError):
    """Sequence too short for the scheme stencil."""
