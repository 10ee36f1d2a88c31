"""Exception hierarchy shared across the package.

Every precondition violation raises a subclass of :class:`SteptwoError`
with a message naming the violated precondition, so the CLI can map
domain errors to a single exit code.
"""


class SteptwoError(Exception):
    """Base class for all domain errors raised by this package."""


class SkewSymmetryError(SteptwoError):
    """A structure matrix is not skew-symmetric (or has odd dimension)."""


class DimensionError(SteptwoError):
    """Shapes of points, tau vectors or matrices do not match the group."""


class DegenerateTauError(SteptwoError):
    """The skew form at this tau has eigenvalue magnitudes below tolerance."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class AmbiguousMatchingError(SteptwoError):
    """Frame continuation could not find a dominant eigenvector matching."""


class GridError(SteptwoError):
    """Sampled-field grids are missing, mismatched or too coarse."""


class QuadratureError(SteptwoError):
    """Numerical quadrature failed to converge to the requested tolerance."""
