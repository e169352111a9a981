"""Exception hierarchy shared by the library, the CLI and the HTTP app."""


class Echo2DError(Exception):
    """Base class for echo2d errors; carries the CLI exit code."""

    exit_code = 1


class ConfigError(Echo2DError, ValueError):
    """Invalid parameters, configuration or output location."""

    exit_code = 2


class SpectrumModeError(ConfigError):
    """Linewidths incompatible with the requested spectrum mode."""


class PeakNotFoundError(Echo2DError, LookupError):
    """No stick peak within tolerance of the requested position."""

    exit_code = 2


class NumericalContractError(Echo2DError):
    """Independent evaluation routes disagree beyond tolerance."""

    exit_code = 3
