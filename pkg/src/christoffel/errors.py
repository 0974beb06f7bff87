"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A requested computation exceeds a configured hard cap."""


class DimensionMismatch(ValueError):
    """Point or map dimension does not match the domain dimension."""


class DomainFormatError(ValueError):
    """Domain JSON is malformed or references an unknown shape."""


class SingularMapError(ValueError):
    """Affine map has (numerically) zero determinant."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to converge."""


class InsufficientDegreesError(ValueError):
    """Too few usable degrees remain for an exponent fit."""
