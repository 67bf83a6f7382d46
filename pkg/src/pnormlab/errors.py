"""Exception hierarchy shared by every pnormlab module."""


class PnormLabError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(PnormLabError, ValueError):
    pass


class InvalidDimensionError(InvalidArgumentError):
    pass


class DegenerateSpectrumError(InvalidArgumentError):
    pass


class InfeasibleParametersError(InvalidArgumentError):
    pass


class SingularGramError(InvalidArgumentError):
    """Weingarten Gram matrix is singular (dimension smaller than moment order)."""


class ResourceLimitError(PnormLabError):
    """A computation would exceed the configured memory cap."""


class InvariantViolationError(PnormLabError, AssertionError):
    """A deterministic mathematical guarantee failed on computed data."""
