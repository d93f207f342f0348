"""Exception hierarchy shared across the package.

Two broad families matter to callers (and to the CLI exit-code mapping):
``DataError`` for inputs that are malformed, inconsistent, or unusable, and
``NumericalError`` for computations that cannot be completed on otherwise
valid inputs.
"""


class HomeboundError(Exception):
    """Base class for all package-specific errors."""


class DataError(HomeboundError):
    """Invalid, inconsistent, or unusable input data."""


class SchemaError(DataError):
    """A file is missing required columns or has an unreadable layout."""


class MonotonicityError(DataError):
    """A cumulative series decreases where it must not."""


class AggregationError(DataError):
    """A day or week cannot be aggregated (missing or zero-device data)."""


class ConfigError(DataError):
    """A generator or run configuration is out of its valid range."""


class ZeroVarianceError(DataError):
    """A statistic is undefined because the series is constant."""


class BoundaryResponseError(DataError):
    """A (0,1)-valued response sits exactly on a boundary."""


class DomainError(DataError, ValueError):
    """An argument lies outside a function's mathematical domain."""


class InsufficientObservationsError(DataError):
    """Too few observations for the requested model or test."""


class NonstationaryError(DataError):
    """Series remain nonstationary after the maximum differencing order."""


class NumericalError(HomeboundError):
    """A numerical routine failed on otherwise valid input."""


class SingularDesignError(NumericalError):
    """A regression design matrix is rank deficient."""


class ConvergenceError(NumericalError):
    """An iterative routine did not converge within its iteration budget."""
