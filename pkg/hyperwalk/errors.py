"""Exception types raised by hyperwalk, and the CLI exit codes they map to."""

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RESOURCE_ERROR = 3
EXIT_INTERNAL_ERROR = 4


class HyperwalkError(Exception):
    """Base class for every error raised on purpose by this package."""

    exit_code = EXIT_INTERNAL_ERROR


class InvalidDimensionError(HyperwalkError, ValueError):
    exit_code = EXIT_CONFIG_ERROR


class DimensionMismatchError(HyperwalkError, ValueError):
    pass


class ParameterRangeError(HyperwalkError, ValueError):
    exit_code = EXIT_CONFIG_ERROR


class NormalizationError(HyperwalkError, ValueError):
    pass


class NotHammingSymmetricError(HyperwalkError, ValueError):
    pass


class DegenerateWeightError(HyperwalkError, ValueError):
    pass


class ResourceLimitError(HyperwalkError):
    exit_code = EXIT_RESOURCE_ERROR


class ConfigError(HyperwalkError, ValueError):
    """Invalid experiment configuration.

    Carries every problem found, not just the first one, so a user can fix a
    config file in one pass.
    """

    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
