"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes or a bipartition do not fit together."""


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class InvalidStateError(ValueError):
    """A matrix or vector fails the physical-state invariants."""


class NumericalError(ArithmeticError):
    """An internal consistency check or an optimizer failed."""
