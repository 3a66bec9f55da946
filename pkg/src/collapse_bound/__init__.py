"""Collapse-induced heating of bulk-acoustic-wave modes read out by a
superconducting qubit: cross-sections, couplings, open-system dynamics and
the resulting noise budget."""

__version__ = "0.1.0"

from ._jit import USE_NUMBA, backend  # noqa: E402
from .constants import AMU, CONSTANTS, HBAR, K_B, PhysicalConstants  # noqa: E402
from .errors import (CollapseBoundError, ConfigError, ConvergenceError,  # noqa: E402
                     DomainError, IntegrationError, ScanError)

__all__ = [
    "AMU", "CONSTANTS", "CollapseBoundError", "ConfigError", "ConvergenceError",
    "DomainError", "HBAR", "IntegrationError", "K_B", "PhysicalConstants", "ScanError",
    "USE_NUMBA", "__version__", "backend",
]
