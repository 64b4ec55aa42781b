"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, shapes or configuration values."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class SnapshotError(IOError):
    """Malformed, truncated or unsupported snapshot file."""


class InstabilityError(RuntimeError):
    """Raised by the time integrators when the mass guard trips."""

    def __init__(self, message, time=None, mass_drift=None):
        super().__init__(message)
        self.time = time
        self.mass_drift = mass_drift
