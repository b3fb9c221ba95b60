"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class SpecValidationError(ValueError):
    """A symbol or run specification violates one of its invariants."""


class EvaluationError(RuntimeError):
    """A function produced a non-finite value; carries the offending point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point
