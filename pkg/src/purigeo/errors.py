"""Exception hierarchy for the library.

Input problems (bad shapes, malformed specs) raise ``ValidationError`` or
plain ``ValueError``; everything below covers conditions the numerics can
detect and refuse.
"""


class PurigeoError(Exception):
    """Base class for all library-specific failures."""


class NonHermitianInput(PurigeoError):
    """A matrix required to be Hermitian deviates beyond tolerance."""


class DomainError(PurigeoError):
    """A scalar map was applied outside its domain (NaN/Inf result)."""


class MissingBoundaryValue(PurigeoError):
    """A zero eigenvalue requires a declared endpoint limit that is absent."""


class RankDeficient(PurigeoError):
    """An operation restricted to invertible base points met a singular one."""


class UnsolvableSupport(PurigeoError):
    """Right-hand side has weight on the null space of the coefficient operator."""


class BasePointMismatch(PurigeoError):
    """A tangent was supplied at a state different from the lift's projection."""


class RankChanged(PurigeoError):
    """The rank of the density operator changed along a transport curve."""


class StepTooLarge(PurigeoError):
    """Integrator step size left a residual beyond the accepted multiple of the tolerance."""


class NotCyclic(PurigeoError):
    """Holonomy invariants requested for endpoints projecting to different states."""


class NotSelftransposed(PurigeoError):
    """A function required to satisfy f(t) = t f(1/t) fails the identity."""


class ExceedsBuresBound(PurigeoError):
    """A candidate monotone function exceeds (1+t)/2 beyond tolerance."""


class PureLimitUndefined(PurigeoError):
    """Pure-state transport requested for a connection without the required limit."""


class ValidationError(PurigeoError):
    """A job or input document violates a declared invariant."""
