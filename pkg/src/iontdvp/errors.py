"""Exception types raised across the package."""


class IonTDVPError(Exception):
    """Base class for all package errors."""


class DomainError(IonTDVPError, ValueError):
    """A disk coordinate or parameter lies outside its admissible domain."""


class TruncationError(IonTDVPError):
    """The truncated Fock basis is too small for the requested state."""


class BoundaryError(DomainError):
    """A trajectory came within the guard distance of the disk boundary."""


class StiffnessError(IonTDVPError):
    """Step size underflow during integration."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConsistencyError(IonTDVPError):
    """Two independent evaluation routes disagree beyond tolerance."""


class UnstableModeError(IonTDVPError):
    """No quasienergy spectrum exists because the mode is unstable."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ConfigError(IonTDVPError, ValueError):
    """Malformed or incomplete scenario configuration."""
