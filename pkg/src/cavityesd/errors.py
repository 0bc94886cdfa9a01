"""Exception types shared across the package."""


class CavityEsdError(Exception):
    """Base class for package errors."""


class LayoutError(CavityEsdError, ValueError):
    """Operators or states defined on incompatible tensor layouts."""


class ValidationError(CavityEsdError, ValueError):
    """A configuration or state violates a documented invariant."""


class ConfigParseError(CavityEsdError, ValueError):
    """A configuration file could not be parsed."""


class IntegrationError(CavityEsdError, RuntimeError):
    """The integrator detected an invariant violation mid-run."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class NumericalDomainError(CavityEsdError, ValueError):
    """A radicand or eigenvalue left its mathematically allowed domain."""
