"""Exception hierarchy.

Every validation failure carries a ``witness``: the smallest piece of data
that exhibits the violated axiom (an index triple, a basis vector, a degree).
Nothing is ever silently repaired.
"""

from __future__ import annotations


class ValidationError(Exception):
    """Base class for all structural/axiom violations."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DimensionMismatch(ValidationError):
    pass


class CompositionNotZero(ValidationError):
    """d_out . d_in != 0 where a complex was expected."""


class NotClosedUnderDifferential(ValidationError):
    """A candidate subcomplex is not preserved by the differential."""


class CosimplicialIdentityError(ValidationError):
    pass


class SimplicialIdentityError(ValidationError):
    pass


class MonadLawViolation(ValidationError):
    """A monad diagram fails to commute on a concrete object."""


class ComonadLawViolation(ValidationError):
    pass


class GroupAxiomError(ValidationError):
    """Cayley table violates associativity/identity/inverse laws."""


class GroupoidAxiomError(ValidationError):
    pass


class ModuleAxiomError(ValidationError):
    """Action matrices violate the (left/right) module laws."""


class JacobiFailure(ValidationError):
    pass


class AnchorNotDerivation(ValidationError):
    pass


class LeibnizFailure(ValidationError):
    pass


class AlgebraAxiomError(ValidationError):
    """Commutative algebra structure constants violate an axiom."""


class ConditionIFailure(ValidationError):
    """Comorphism condition (i): anchor compatibility diagram."""


class ConditionIIFailure(ValidationError):
    """Comorphism condition (ii): bracket compatibility."""


class ExactnessError(ValidationError):
    pass


class TruncationError(ValidationError):
    """A cohomology degree beyond the reliable truncation was requested."""


class SizeLimitError(ValidationError):
    """Desk-scale guard tripped (group order / construction dimension)."""
