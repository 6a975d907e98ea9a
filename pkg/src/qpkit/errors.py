"""Exception hierarchy shared by all qpkit modules."""


class QPKitError(Exception):
    """Base class for qpkit errors."""


class FieldError(QPKitError, ValueError):
    """Incompatible radicals or malformed field data."""


class DomainError(QPKitError, ArithmeticError):
    """An operation was applied outside its domain (e.g. inverting zero)."""


class DimensionError(QPKitError, ValueError):
    pass


class PreconditionError(QPKitError, ValueError):
    """A documented precondition does not hold.

    ``witness`` carries the integer relation that breaks the precondition,
    when there is one.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GridError(QPKitError, ValueError):
    """Sampling grid too coarse for alias-free evaluation."""


class ConvergenceError(QPKitError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""
