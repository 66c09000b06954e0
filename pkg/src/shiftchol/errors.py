"""Exception hierarchy shared across the package."""


class ShiftCholError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ShiftCholError):
    pass


class WindowTooShort(ShiftCholError):
    """A sample window is shorter than the degree of the operator needs."""


class NotInRInf(ShiftCholError):
    """Operator has support off the (q*)^k q^k diagonal."""


class NotPSD(ShiftCholError):
    """Operator fails the positive semi-definiteness check."""


class Singular(ShiftCholError):
    """A pointwise scaling weight is too close to zero to invert."""


class NoLeafEdge(ShiftCholError):
    """No eliminable column: the sparsity graph contains a cycle."""


class MalformedColumn(ShiftCholError):
    """A column has more than two nonzero entries."""


class TooLarge(ShiftCholError):
    """Input exceeds the guard for an exhaustive search."""


class NotAForest(ShiftCholError):
    """The network graph contains a cycle."""


class NotLemma3Shape(ShiftCholError):
    """Factor is not of the real-plus-forward-shift form L0 + L1 q."""


class PreconditionViolated(ShiftCholError):
    pass


class NoConvergence(ShiftCholError):
    pass


class SchemaError(ShiftCholError):
    """Malformed input document."""
