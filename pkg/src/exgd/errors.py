"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(ArithmeticError):
    """The density is unbounded at the requested point (x = 0 with alpha < 1)."""


class SurvivalUnderflowError(ZeroDivisionError):
    """The survival function underflowed to zero, so a ratio over it is undefined."""


class SeriesConvergenceError(ArithmeticError):
    """A truncated series did not meet its tolerance within the term budget.

    The best available estimate and a rough error bound are attached so callers
    can decide whether to use the value anyway.
    """

    def __init__(self, message, estimate=float("nan"), error_estimate=float("inf"), terms=0):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
        self.terms = terms


class ConvergenceError(RuntimeError):
    """An iterative root search failed to converge."""


class DataError(ValueError):
    """An input data file could not be read or parsed."""
