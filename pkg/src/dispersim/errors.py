"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific type that applies.
"""

from __future__ import annotations


class DispersimError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(DispersimError):
    """Malformed or inconsistent experiment configuration."""

    def __init__(self, message: str, *, source: str | None = None, key: str | None = None):
        self.source = source
        self.key = key
        prefix = ""
        if source is not None:
            prefix += f"{source}: "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)


class ResourceLimitError(DispersimError):
    """A configured size/budget cap would be exceeded (grid, ring, panel budget)."""


class AccuracyError(DispersimError):
    """A quadrature failed to reach the requested tolerance within its budget.

    Carries the achieved error estimate so callers can report it.
    """

    def __init__(self, message: str, *, achieved: float, requested: float):
        self.achieved = achieved
        self.requested = requested
        super().__init__(f"{message} (achieved {achieved:.3e}, requested {requested:.3e})")


class NumericalError(DispersimError):
    """An internal numerical routine (eigensolver, linear solve) failed."""
