"""Exception types shared across the package."""


class QKZError(Exception):
    """Base class for numeric/setup failures in this package."""


class PoleEvaluationError(QKZError):
    """A formula was evaluated at (or numerically on top of) a pole."""


class GenericPositionError(QKZError):
    """A point configuration violates the generic-position requirement.

    Raised before evaluation when some denominator would fall below
    1e-10 times its local scale.
    """


class ContourError(QKZError):
    """A contour plan cannot be built or a quadrature node is invalid."""
