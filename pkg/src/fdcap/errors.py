class FdcapError(Exception):
    """Base class for library errors."""


class PatternError(FdcapError, ValueError):
    """Malformed pattern text or pattern set."""


class BudgetExhausted(FdcapError):
    """A search hit its configured resource budget before finishing.

    Never signals a wrong answer: callers either retry with a larger
    budget or report the computation as incomplete.
    """


class ConstructionError(FdcapError, ValueError):
    """A construction's precondition does not hold for the given input."""


class NumericalError(FdcapError, ArithmeticError):
    """An iterative numerical routine failed (non-convergence, solver failure)."""


class InvariantViolation(FdcapError):
    """An internal self-check failed."""
