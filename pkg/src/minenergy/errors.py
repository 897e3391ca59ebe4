"""Exception hierarchy shared by every module."""


class MinEnergyError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MinEnergyError, ValueError):
    """Non-finite entries, malformed arrays or out-of-range parameters."""


class DimensionError(InvalidInputError):
    """Array shapes that do not fit together."""


class InvalidHorizonError(InvalidInputError):
    """Control horizon smaller than one."""


class ConfigurationError(MinEnergyError):
    """A required optional piece (output map, output data, ...) is missing."""


class EmptyDataError(InvalidInputError):
    """An experiment set without experiments."""


class AssumptionViolatedError(MinEnergyError):
    """A hypothesis needed for an exact data-driven formula does not hold.

    ``condition`` names the failed hypothesis so callers can report it.
    """

    def __init__(self, condition, message):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
