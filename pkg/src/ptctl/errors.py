"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter or argument lies outside the domain of an operation.

    ``field`` names the offending argument when there is a single culprit.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ConfigError(ValueError):
    """Malformed configuration file, override or scenario name."""


class NumericalError(RuntimeError):
    """A simulation produced a non-finite state or control."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class DisturbanceBoundError(NumericalError):
    """A disturbance evaluated outside its declared bound."""
