"""Exception types shared across the package."""


class LevyFluctError(Exception):
    """Base class for all package errors."""


class SpecError(LevyFluctError):
    """Invalid process specification (bad parameters, compound Poisson, ...)."""


class QuadratureError(LevyFluctError):
    """A numerical integration did not reach the requested tolerance.

    Carries the achieved absolute error estimate when known.
    """

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class RangeError(LevyFluctError):
    """A value lies outside the numerically achievable range of an inverse map."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


class InversionError(LevyFluctError):
    """Laplace inversion self-consistency failure; carries both estimates."""

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class PreconditionError(LevyFluctError):
    """A gated operation was called on a spec that fails its precondition."""


class UnsupportedSpecError(LevyFluctError):
    """No sampling or evaluation route exists for this spec."""


class ConfigError(LevyFluctError):
    """Malformed configuration file or CLI usage."""
