class CollapseBoundError(Exception):
    """Base class for all package errors."""


class DomainError(CollapseBoundError, ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(CollapseBoundError, RuntimeError):
    """Iterative numeric routine did not reach its tolerance.

    Carries the best estimate and its error bound so callers can decide
    whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class IntegrationError(CollapseBoundError, RuntimeError):
    """Time integration failed (step-size underflow, non-finite state)."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


class ScanError(CollapseBoundError, RuntimeError):
    """Parameter scan did not produce a well-defined optimum."""

    def __init__(self, message, grid=None, values=None):
        super().__init__(message)
        self.grid = grid
        self.values = values


class ConfigError(CollapseBoundError, ValueError):
    """Invalid experiment configuration."""
