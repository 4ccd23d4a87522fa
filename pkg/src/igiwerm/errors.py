"""Exception hierarchy shared across the package."""


class IgiwermError(Exception):
    """Base class for all package errors."""


class DomainError(IgiwermError, ValueError):
    """An argument lies outside the domain of a mathematical map."""


class SupportError(IgiwermError, ValueError):
    """A density evaluated to (numerically) zero where it must be positive."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ShiftError(IgiwermError, ValueError):
    """Covariate-shift construction cannot proceed (degenerate projection, empty split)."""


class FitError(IgiwermError, RuntimeError):
    """A learner failed to produce a model."""


class SingularMatrixError(FitError):
    pass


class ConvergenceError(FitError):
    def __init__(self, message, grad_norm=None):
        super().__init__(message)
        self.grad_norm = grad_norm


class SeparationError(FitError):
    """Logistic parameters diverged: the weighted data are (quasi-)separable."""


class ParseError(IgiwermError, ValueError):
    """Malformed LIBSVM input. ``line`` is 1-based."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(IgiwermError, ValueError):
    pass
