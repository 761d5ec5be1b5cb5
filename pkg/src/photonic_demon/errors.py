"""Exception types raised across the package."""


class InvalidDimensionError(ValueError):
    """A matrix, vector or index does not fit the requested dimensions."""


class ProblemSizeError(ValueError):
    """The requested computation is too large for an exact factorial-time sum."""


class NumericalConsistencyError(ArithmeticError):
    """A numerical result violated an invariant it must satisfy (normalization, reality, ...)."""
