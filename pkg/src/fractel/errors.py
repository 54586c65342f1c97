"""Exception hierarchy shared by the numerical routines."""


class FractelError(Exception):
    """Base class for all errors raised by fractel."""


class DomainError(FractelError, ValueError):
    """An argument lies outside the domain of the requested function."""


class AccuracyError(FractelError, ArithmeticError):
    """The internal method could not certify the requested accuracy."""


class ConvergenceError(FractelError, ArithmeticError):
    """A quadrature or transform did not converge within its budget."""


class BudgetError(FractelError, RuntimeError):
    """A sampler exceeded its iteration or rejection budget."""


class UnsupportedError(FractelError, ValueError):
    """The requested combination of operator and process is not supported."""


class DimensionError(FractelError, ValueError):
    """Initial data incompatible with the requested spatial dimension."""


class ConfigError(FractelError, ValueError):
    """A run configuration failed validation."""
