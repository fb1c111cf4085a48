"""Exception types shared across the package."""


class GQPError(Exception):
    """Base class for package errors."""


class DomainError(GQPError, ValueError):
    """Input outside the mathematical domain of an operation."""


class TruncationError(GQPError, ArithmeticError):
    """A truncated quadrature left a non-negligible tail."""


class DivergenceError(GQPError, ArithmeticError):
    """An integral was detected to diverge on its truncated support."""


class VarianceBlowUp(GQPError, ArithmeticError):
    """Monte Carlo standard error too large relative to the estimate.

    The offending result is attached as ``result`` so callers can still
    report it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class TruncationWarning(UserWarning):
    """Integrand mass at the edge of a truncated support."""
