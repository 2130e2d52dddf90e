"""Exception taxonomy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class ShsError(Exception):
    exit_code = 3

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class DomainError(ShsError, ValueError):
    """Argument outside the admissible domain (interval, quadrant, ...)."""

    exit_code = 2


class ParameterError(ShsError, ValueError):
    exit_code = 2


class ImmersionError(ShsError, ValueError):
    """|h'| dropped below the immersion floor."""

    exit_code = 2


class ObstructionError(ShsError):
    """A mathematical obstruction: the requested object provably does not exist."""

    exit_code = 2


class PreconditionError(ShsError):
    exit_code = 2


class StabilizationError(ShsError):
    """The stabilization conditions fail where they are required."""

    exit_code = 2


class NotSynthesizableError(StabilizationError):
    """Input outside the hypotheses of the synthesis (e.g. constant interior slope)."""


class TooLongError(PreconditionError):
    """Homotopy length above the bound required by a cobordism construction."""


class DegenerateHomotopyError(PreconditionError):
    """delta = 0 within tolerance, or splitting needs too many pieces."""


class NumericalError(ShsError):
    """Refinement, quadrature or root finding did not converge."""

    exit_code = 3


class ConstructionError(ShsError):
    """An internal construction failed its own re-check."""

    exit_code = 3


class MalformedInputError(ShsError):
    exit_code = 4
