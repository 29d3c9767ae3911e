"""Exception types shared across the package."""


class SrwdroError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(SrwdroError):
    """Vector/matrix shapes do not agree."""


class InvalidDistributionError(SrwdroError):
    """Weights are negative, mismatched, or do not sum to one."""


class ConfigError(SrwdroError):
    """Invalid or inconsistent configuration/parameters."""


class NumericError(SrwdroError):
    """A numeric routine failed to converge or produced non-finite values."""


class ProblemTooLargeError(SrwdroError):
    """An exact enumeration was refused because it would be too expensive."""
