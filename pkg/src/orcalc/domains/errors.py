"""Exception hierarchy shared by every orcalc domain."""

from typing import Optional


class OrcalcError(Exception):
    """Base class of every error raised by orcalc."""
    pass


class PreconditionError(OrcalcError):
    """An operation was called outside of its domain of definition."""
    pass


class InputError(OrcalcError):
    """User supplied data could not be turned into domain objects."""
    pass


# numlin
class NotPositiveError(OrcalcError):
    """Operator has an eigenvalue below -residual_tol * ||A||."""
    pass


class DimensionMismatchError(PreconditionError):
    """Operands do not live in the same ambient space."""
    pass


class NotHermitianError(InputError):
    """Matrix deviates from its adjoint by more than sym_tol."""
    pass


class SingularError(OrcalcError):
    """Matrix expected to be invertible is rank deficient."""
    pass


# ranges
class NoSolutionError(PreconditionError):
    """Range inclusion required by a factorization fails."""
    pass


class NotInRangeError(OrcalcError):
    """Vector does not belong to the operator range."""
    pass


class NotContractionError(OrcalcError):
    """Operator norm exceeds one."""
    pass


# proj
class OverlapError(OrcalcError):
    """Range and nullspace of a projection intersect non-trivially."""
    pass


class RangeMismatchError(OrcalcError):
    """Positive factor does not have the prescribed range."""
    pass


class DomainNotFullError(OrcalcError):
    """Projection is not defined on the whole space."""
    pass


class NotOptimalError(OrcalcError):
    """Factorization T = P A is not optimal for T."""
    pass


class NullspaceViolationError(OrcalcError):
    """N(D) is not contained in N(A)."""
    pass


class NotInDomainError(OrcalcError):
    """Vector lies outside the domain of a partially defined operator."""
    pass


# weights
class NotSpanningError(OrcalcError):
    """S + (BS)^perp is a proper subspace."""
    pass


class NotBSymmetricError(PreconditionError):
    """Projection is not B-symmetric."""
    pass


# schur
class NotWeaklyComplementableError(PreconditionError):
    """R(b) is not contained in R(|a|^{1/2})."""
    pass


class WrongNullspaceError(OrcalcError):
    """Projection nullspace differs from the orthogonal complement of S."""
    pass


class InadmissibleWError(OrcalcError):
    """Perturbation W violates a condition of the P*_0 parametrization."""

    def __init__(self, condition: str, residual: Optional[float] = None):
        self.condition = condition
        self.residual = residual
        message = f"Inadmissible W: {condition}"
        if residual is not None:
            message += f" (residual {residual:.3e})"
        super().__init__(message)


class NotMemberError(PreconditionError):
    """Projection does not belong to P*(B, S)."""
    pass


# cli
class ParseError(InputError):
    """Matrix file is malformed."""
    pass


class BadModelError(InputError):
    """Unknown truncation lab model or invalid size."""
    pass
