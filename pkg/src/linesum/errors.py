"""Exception hierarchy shared by all linesum modules."""


class LinesumError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstance(LinesumError):
    """Malformed problem instance (bad JSON, wrong types, negative entries...)."""


class MarginMismatch(InvalidInstance):
    """Row-sum total differs from column-sum total."""


class OutOfRange(InvalidInstance):
    """A margin entry violates its admissible range."""


class DegenerateDensity(LinesumError):
    """Density is 0 or 1, so the dense-regime formulas do not apply."""


class NonConvergence(LinesumError):
    """Fixed-point iteration exhausted its iteration budget.

    Attributes: iterations, residual (last physical defect).
    """

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class NumericalBlowup(LinesumError):
    """An intermediate quantity left its valid numerical range."""


class IdentityViolation(LinesumError):
    """Two independently computed forms of the same quantity disagree."""


class ResourceLimit(LinesumError):
    """A configured state/evaluation cap was exceeded."""


class DomainError(LinesumError):
    """Arguments outside the mathematical domain of a function."""
