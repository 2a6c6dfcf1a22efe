"""Exception hierarchy.

Validation problems derive from ``ValueError`` so callers can catch them the
usual way; the CLI maps each family to a fixed exit code.
"""


class CayleyError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CayleyError, ValueError):
    pass


class EvenModulus(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NotStrictlyIncreasing(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class MOutOfRange(ValidationError):
    pass


class MismatchedModulus(ValidationError):
    pass


class ZeroSlice(ValidationError):
    pass


class JOutOfRange(ValidationError):
    pass


class BadInterval(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class TooLarge(ValidationError):
    """Dense linear algebra refused because the matrix is too big."""


class ToleranceNotMet(CayleyError, ArithmeticError):
    """Quadrature refinement hit its resolution cap before converging."""


class BudgetExceeded(CayleyError, RuntimeError):
    """An enumeration would exceed the configured work budget."""
