"""Exception types raised across the package."""


class LocPerturbError(Exception):
    """Base class for all locperturb errors."""


class ParameterError(LocPerturbError, ValueError):
    """A numeric parameter is outside its valid range."""


class DegeneratePriorError(ParameterError):
    """The prior's target coincides with the true location."""


class ContractError(LocPerturbError, TypeError):
    """An operation was applied to an object of the wrong kind."""


class UnsupportedConfigurationError(LocPerturbError, ValueError):
    """A configuration the mechanisms do not define (reported, not computed)."""


class AmbiguousRankingError(LocPerturbError, ValueError):
    """Two points of interest are equidistant from the true location."""


class NumericError(LocPerturbError, RuntimeError):
    """A numeric routine failed to converge."""
