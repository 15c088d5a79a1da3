"""Exception hierarchy shared by every frackell module."""


class FrackellError(Exception):
    """Base class for all errors raised by frackell."""


class DomainError(FrackellError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(FrackellError, OverflowError):
    """A result cannot be represented at the configured exponent range."""


class NonConvergenceError(FrackellError, ArithmeticError):
    """A series did not reach its tolerance within the configured limits."""

    def __init__(self, message: str, *, terms: int | None = None, last_ratio=None):
        super().__init__(message)
        self.terms = terms
        self.last_ratio = last_ratio


class CapacityError(FrackellError, ValueError):
    """A precomputed structure is too small for the request."""


class ContractError(FrackellError, ValueError):
    """Two arguments that must agree do not."""
