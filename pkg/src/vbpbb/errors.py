"""Exception types raised across the package."""


class VbpbbError(Exception):
    """Base class for all package errors."""


class ParameterError(VbpbbError, ValueError):
    """A numeric parameter is invalid or inconsistent with the data.

    ``parameter`` names the offending field so the CLI can report it.
    """

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter


class ShapeError(ParameterError):
    """Arrays or series that must align do not."""


class ConfigurationError(ParameterError):
    """A run configuration is structurally valid but cannot be executed as given."""


class InsufficientReplicatesError(ParameterError):
    """Too few bootstrap replicates for the requested statistic."""


class RangeError(ParameterError):
    """A time window falls outside the series it is applied to."""
