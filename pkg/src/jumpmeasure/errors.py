"""Exception hierarchy shared by all modules."""


class JumpMeasureError(Exception):
    """Base class for every error raised by this package."""


class DomainError(JumpMeasureError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NotInBStarError(JumpMeasureError, ValueError):
    """A jump-size set has 0 in its closure, so it does not separate jumps from 0."""


class NumericError(JumpMeasureError, ArithmeticError):
    """A function value or numerical routine produced a non-finite or unreliable result."""


class ConfigError(JumpMeasureError, ValueError):
    """A simulation or verification configuration is invalid."""
