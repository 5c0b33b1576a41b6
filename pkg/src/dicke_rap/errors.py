"""Exception types shared across the package."""


class DickeRapError(Exception):
    """Base class for all package errors."""


class DomainError(DickeRapError, ValueError):
    """An argument is outside its mathematical domain (bad m, bad axis, ...)."""


class ContractError(DickeRapError, ValueError):
    """A precondition on state data is violated (e.g. unnormalized state)."""


class ConfigError(DickeRapError, ValueError):
    """A scenario configuration failed validation."""


class IntegrationError(DickeRapError, RuntimeError):
    """Time integration violated its accuracy contract (norm drift)."""

    def __init__(self, message, t_fail=None):
        super().__init__(message)
        self.t_fail = t_fail


class NumericalError(DickeRapError, RuntimeError):
    """Non-finite amplitudes or a failed linear-algebra kernel."""


class ContrastUndefinedError(DickeRapError, ValueError):
    """Mean spin projection too small for the squeezing parameter."""


class TargetNotFoundError(DickeRapError, RuntimeError):
    """Root bracketing for a target-state search failed."""
