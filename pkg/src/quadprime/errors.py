"""Exception hierarchy shared by all modules."""


class QuadPrimeError(Exception):
    """Base class for all package errors."""


class RejectedInput(QuadPrimeError, ValueError):
    """Input violates a precondition (non-squarefree d, zero element, ...)."""


class UnsupportedSignature(QuadPrimeError):
    """Operation is not defined for this field signature."""


class CapacityError(QuadPrimeError):
    """A configured size bound would be exceeded."""


class ExactHitError(QuadPrimeError):
    """The target is (to working precision) an element of the field."""

    def __init__(self, message, a=None, q=None):
        super().__init__(message)
        self.a = a
        self.q = q


class UsageError(QuadPrimeError):
    """Bad command line or configuration."""
