"""Exception hierarchy for alia.

Each error also derives from the builtin it refines, so callers that catch
``ValueError`` or ``RuntimeError`` keep working.
"""

from __future__ import annotations

from typing import Optional, Sequence


class AliaError(Exception):
    """Base class for every error raised by alia."""


class IncompatibleFieldError(AliaError, ValueError):
    """A scalar cannot be embedded into the requested cyclotomic field."""


class NotFiniteOrderError(AliaError, ValueError):
    """An operator or Möbius map does not have the claimed finite order."""


class DimensionMismatchError(AliaError, ValueError):
    """Vector or matrix dimensions do not agree."""


class PoleError(AliaError, ValueError):
    """A point lies in the pole set where a function or action is evaluated."""


class ChartError(AliaError, ValueError):
    """An operation needs a finite base point or a different coordinate chart."""


class PreconditionError(AliaError, ValueError):
    """A mathematical precondition of an operation is violated."""


class StabilizationError(PreconditionError):
    """Quotient dimensions did not stabilize within the degree budget."""

    def __init__(self, message: str, dimensions: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.dimensions = list(dimensions or [])


class ConfigError(AliaError, ValueError):
    """An action or run configuration is malformed."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class InconsistencyError(AliaError, RuntimeError):
    """An internal invariant was breached. Always a bug."""
