"""Exception hierarchy shared by all modules."""


class JensenDualityError(Exception):
    """Base class for every error raised by this package."""


class DomainError(JensenDualityError, ValueError):
    """A point, disk or support falls outside the admissible region."""


class EvaluationError(JensenDualityError, ArithmeticError):
    """A field produced a non-finite value where a finite one was required.

    ``point`` holds the offending sample (a complex number) when known.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ValidationError(JensenDualityError, ValueError):
    """An input object violates its declared invariants."""


class ConfigurationError(JensenDualityError, ValueError):
    """Construction parameters are unusable (e.g. a grid that is too coarse)."""


class SolverError(JensenDualityError, RuntimeError):
    """The simplex solver could not finish (numerical trouble, iteration guard)."""


class InvalidTestObject(JensenDualityError, ValueError):
    """A measure or function handed to an evaluator fails its admissibility check."""
