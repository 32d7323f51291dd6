"""Prime-denominator Diophantine approximation in quadratic number fields."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ExactHitError,
    QuadPrimeError,
    RejectedInput,
    UnsupportedSignature,
    UsageError,
)
from .field_core import AlgebraicInt, FieldDescriptor, FieldElement, make_field  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "AlgebraicInt",
    "BACKEND",
    "CapacityError",
    "ExactHitError",
    "FieldDescriptor",
    "FieldElement",
    "QuadPrimeError",
    "RejectedInput",
    "UnsupportedSignature",
    "UsageError",
    "make_field",
]
