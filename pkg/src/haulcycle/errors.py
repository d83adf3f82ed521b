"""Exception hierarchy shared by all haulcycle modules."""


class HaulCycleError(Exception):
    """Base class for every error raised by this package."""


class NonStochasticMatrix(HaulCycleError, ValueError):
    pass


class ReducibleMatrix(HaulCycleError, ValueError):
    pass


class UtilizationExceedsOne(HaulCycleError, ValueError):
    pass


class PopulationNotOne(HaulCycleError, ValueError):
    pass


class NoBracket(HaulCycleError, RuntimeError):
    pass


class DegenerateVariance(HaulCycleError, ValueError):
    """sigma_W is zero; the deterministic FLOW model applies instead."""


class StateSpaceTooLarge(HaulCycleError, ValueError):
    pass


class Nonconvergence(HaulCycleError, RuntimeError):
    pass


class AssumptionViolated(HaulCycleError, ValueError):
    pass


class InvalidConfig(HaulCycleError, ValueError):
    pass


class ConfigError(HaulCycleError, ValueError):
    """Config file could not be parsed or failed validation.

    ``field`` holds a dotted path to the offending entry when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
