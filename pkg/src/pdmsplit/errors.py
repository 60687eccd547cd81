"""Exception types shared across the package."""


class PdmError(Exception):
    """Base class for all package errors."""


class EvaluationError(PdmError, ArithmeticError):
    """A function evaluation produced a non-finite value."""


class AccuracyError(PdmError, ArithmeticError):
    """An adaptive routine ran out of refinement before meeting its tolerance.

    The best available estimate is kept on ``estimate``.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class DomainError(PdmError, ValueError):
    """An argument lies outside the domain of the quantity being evaluated."""


class RestrictionError(PdmError, ValueError):
    """Ambiguity parameters outside the set admitted by the splitting."""
