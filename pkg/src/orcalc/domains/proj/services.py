"""Projections with prescribed range and nullspace.

A :class:`Projection` is defined on ``M ∔ N`` only, so the proper-domain cases stay
representable. Every constructor verifies the identities it promises and logs the
residuals; callers decide what to do with a failed verification.
"""

from typing import Any, Literal, Optional

import numpy as np
import scipy.linalg
from loguru import logger

from orcalc.domains.errors import (
    DomainNotFullError,
    NotOptimalError,
    NotPositiveError,
    NullspaceViolationError,
    OverlapError,
    RangeMismatchError,
    SingularError,
)
from orcalc.domains.numlin.models import (
    DEFAULT_TOLERANCE,
    HermitianOperator,
    PartialOperator,
    Subspace,
    TolerancePolicy,
)
from orcalc.domains.numlin.services import (
    adjoint,
    as_matrix,
    check_residual,
    is_psd,
    make_subspace,
    nullspace_of,
    operator_norm,
    orthogonal_complement,
    orthonormalize,
    pinv,
    projector,
    range_of,
    relative_residual,
    require_same_ambient,
    same_subspace,
    sqrt_psd,
)
from orcalc.domains.proj.models import GammaRep, Projection
from orcalc.domains.ranges.services import range_intersection

Orientation = Literal["range", "nullspace"]


def _full_space(ambient_dim: int) -> Subspace:
    return make_subspace(np.eye(ambient_dim, dtype=complex), ambient_dim)


def _verify_projection(projection: Projection, tol: TolerancePolicy) -> bool:
    """E m = m on M, E n = 0 on N and E² = E on the domain."""
    m, n = projection.range_sub.basis, projection.null_sub.basis
    ok = check_residual("E fixes M", relative_residual(projection.apply(m, tol, 1.0), m), tol.residual_tol)
    ok &= check_residual(
        "E kills N", relative_residual(projection.apply(n, tol, 1.0), np.zeros_like(n)), tol.residual_tol
    )
    images = projection.base.action
    ok &= check_residual("E² = E", relative_residual(projection.apply(images, tol, 1.0), images), tol.residual_tol)
    return ok


def make_projection(m: Subspace, n: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """P_{M // N} on the domain M ∔ N."""
    require_same_ambient(m.basis, n.basis)
    overlap = range_intersection(m, n, tol)
    if not overlap.is_trivial:
        raise OverlapError(f"M ∩ N has dimension {overlap.dim}")
    joint = np.hstack([m.basis, n.basis])
    domain = orthonormalize(joint, tol, scale=1.0)
    coefficients = pinv(joint, tol, scale=1.0) @ domain.basis
    action = m.basis @ coefficients[: m.dim]
    projection = Projection(base=PartialOperator(domain=domain, action=action), range_sub=m, null_sub=n)
    _verify_projection(projection, tol)
    logger.debug(f"projection built: dim M = {m.dim}, dim N = {n.dim}, domain full = {domain.is_full}")
    return projection


def projection_from_matrix(
    value: Any, domain: Optional[Subspace] = None, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> Projection:
    """Projection acting as the idempotent ``value`` on ``domain`` (the whole space by default)."""
    matrix = as_matrix(value)
    domain = domain if domain is not None else _full_space(matrix.shape[1])
    action = matrix @ domain.basis
    range_sub = range_of(action, tol)
    kernel = nullspace_of(action, tol)
    null_sub = orthonormalize(domain.basis @ kernel.basis, tol, scale=1.0)
    projection = Projection(base=PartialOperator(domain=domain, action=action), range_sub=range_sub, null_sub=null_sub)
    _verify_projection(projection, tol)
    return projection


def adjoint_projection(projection: Projection, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """E^H = P_{N^perp // M^perp} for a projection defined everywhere."""
    if not projection.is_full:
        raise DomainNotFullError("the adjoint of a proper-domain projection is not a projection on H")
    return make_projection(
        orthogonal_complement(projection.null_sub, tol), orthogonal_complement(projection.range_sub, tol), tol
    )


def gamma_rep(
    m: Subspace,
    n: Subspace,
    a1: Any,
    a2: Any,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> GammaRep:
    """Γ = (A1² + A2²)^{1/2}, E = D Γ^+ with A1² = D Γ, and P_Γ = Γ^+ E Γ."""
    first = a1 if isinstance(a1, HermitianOperator) else HermitianOperator.from_matrix(a1, tol)
    second = a2 if isinstance(a2, HermitianOperator) else HermitianOperator.from_matrix(a2, tol)
    require_same_ambient(first.entries, second.entries, m.basis, n.basis)
    for name, factor in (("A1", first), ("A2", second)):
        if not is_psd(factor, tol):
            raise NotPositiveError(f"{name} is not positive semidefinite")
    if not same_subspace(range_of(first.entries, tol), m, tol):
        raise RangeMismatchError("R(A1) differs from M")
    if not same_subspace(range_of(second.entries, tol), n, tol):
        raise RangeMismatchError("R(A2) differs from N")
    overlap = range_intersection(m, n, tol)
    if not overlap.is_trivial:
        raise OverlapError(f"M ∩ N has dimension {overlap.dim}")

    a1_squared = first.entries @ first.entries
    gamma = sqrt_psd(a1_squared + second.entries @ second.entries, tol)
    gamma_pinv = pinv(gamma.entries, tol)
    d = a1_squared @ gamma_pinv
    e_matrix = d @ gamma_pinv
    pgamma = HermitianOperator.from_matrix(gamma_pinv @ a1_squared @ gamma_pinv, tol)

    domain = range_of(gamma.entries, tol)
    projection = Projection(
        base=PartialOperator(domain=domain, action=e_matrix @ domain.basis), range_sub=m, null_sub=n
    )
    _verify_projection(projection, tol)
    bound = tol.residual_tol
    check_residual("E Γ² = A1²", relative_residual(e_matrix @ gamma.entries @ gamma.entries, a1_squared), bound)
    check_residual("D Γ = A1²", relative_residual(d @ gamma.entries, a1_squared), bound)
    check_residual("Γ D^H = A1²", relative_residual(gamma.entries @ adjoint(d), a1_squared), bound)
    check_residual("P_Γ² = P_Γ", relative_residual(pgamma.entries @ pgamma.entries, pgamma.entries), bound)
    return GammaRep(A1=first, A2=second, Gamma=gamma, Pgamma=pgamma, projection=projection)


def gamma_rep_default(m: Subspace, n: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> GammaRep:
    """Γ-representation with A1 = P_M and A2 = P_N."""
    return gamma_rep(m, n, projector(m), projector(n), tol)


def pgamma_change(g: Any, pg: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """G^{-1} P_Γ G, the bounded projection obtained by a change of Γ."""
    change, orthogonal = as_matrix(g), as_matrix(pg)
    require_same_ambient(change, orthogonal)
    rank = range_of(change, tol).dim
    if rank < change.shape[0]:
        raise SingularError(f"G has rank {rank} < {change.shape[0]}")
    if relative_residual(orthogonal @ orthogonal, orthogonal) > tol.residual_tol or (
        relative_residual(orthogonal, adjoint(orthogonal)) > tol.sym_tol
    ):
        logger.warning("Pg is not an orthogonal projector")
    result = scipy.linalg.solve(change, orthogonal @ change)
    check_residual("G^{-1} Pg G idempotent", relative_residual(result @ result, result), tol.residual_tol)
    return result


def block_rep(
    projection: Projection, orientation: Orientation = "range", tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> PartialOperator:
    """Off-diagonal block of E.

    ``range``: E = [[1, x], [0, 0]] with respect to M ⊕ M^perp, x : P_{M^perp}(N) -> M.
    ``nullspace``: E = [[I, 0], [y, 0]] with respect to S ⊕ S^perp, S = N^perp,
    y : P_S(M) -> S^perp.
    """
    m, n = projection.range_sub, projection.null_sub
    if orientation == "range":
        if not projection.is_full:
            raise DomainNotFullError("the range-oriented block needs E defined on the whole space")
        m_perp = orthogonal_complement(m, tol)
        domain = orthonormalize(m_perp.projector_matrix() @ n.basis, tol, scale=1.0)
        block = PartialOperator(domain=domain, action=projection.apply(domain.basis, tol))
        check_residual(
            "E = P_M + x P_{M^perp}",
            relative_residual(projection.matrix(), m.projector_matrix() + block.extended()),
            tol.residual_tol,
        )
        return block

    s = orthogonal_complement(n, tol)
    p_s = s.projector_matrix()
    compressed = p_s @ m.basis
    domain = orthonormalize(compressed, tol, scale=1.0)
    p_s_perp = np.eye(projection.ambient_dim) - p_s
    action = p_s_perp @ m.basis @ pinv(compressed, tol, scale=1.0) @ domain.basis
    block = PartialOperator(domain=domain, action=action)
    vectors = projection.domain.basis
    reassembled = p_s @ vectors + block.apply(p_s @ vectors, tol, 1.0)
    check_residual("E = P_S + y P_S", relative_residual(projection.apply(vectors, tol), reassembled), tol.residual_tol)
    return block


def projection_pinv(projection: Projection, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """E^+ = P_{N^perp} P_M."""
    p_m = projection.range_sub.projector_matrix()
    dagger = (np.eye(projection.ambient_dim) - projection.null_sub.projector_matrix()) @ p_m
    bound = tol.residual_tol
    check_residual("E E^+ = P_M", relative_residual(projection.apply(dagger, tol, 1.0), p_m), bound)
    vectors = projection.domain.basis
    p_n_perp = np.eye(projection.ambient_dim) - projection.null_sub.projector_matrix()
    check_residual(
        "E^+ E = P_{N^perp} on D(E)",
        relative_residual(dagger @ projection.apply(vectors, tol, 1.0), p_n_perp @ vectors),
        bound,
    )
    return dagger


def phi_set(t: Any, p: Any, a: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """P_{R(A) // R(T)^perp} for a factorization T = P A with A optimal for T."""
    target, orthogonal, factor = as_matrix(t), as_matrix(p), as_matrix(a)
    require_same_ambient(target, orthogonal, factor)
    range_t = range_of(target, tol)
    if relative_residual(orthogonal, range_t.projector_matrix()) > tol.residual_tol:
        raise NotOptimalError("P is not the orthogonal projector onto R(T)")
    if relative_residual(target, orthogonal @ factor) > tol.residual_tol:
        raise NotOptimalError("T differs from P A")
    if not is_psd(HermitianOperator.from_matrix(factor, tol), tol):
        raise NotOptimalError("A is not positive semidefinite")
    if not same_subspace(nullspace_of(target, tol), nullspace_of(factor, tol), tol):
        raise NotOptimalError("N(T) differs from N(A)")
    projection = make_projection(range_of(factor, tol), nullspace_of(adjoint(target), tol), tol)
    if not projection.is_full:
        logger.warning(f"R(A) ∔ R(T)^perp has dimension {projection.domain.dim} < {projection.ambient_dim}")
    return projection


def phi_uniqueness_holds(t: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """R(T^H) ∩ N(T^H) = {0}, the condition for Φ(T) to be a single projection."""
    target = as_matrix(t)
    return range_intersection(range_of(adjoint(target), tol), nullspace_of(adjoint(target), tol), tol).is_trivial


def kaufman_operator(a: Any, d: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> PartialOperator:
    """C = A D^+ on R(D); requires N(D) ⊆ N(A)."""
    left, positive = as_matrix(a), as_matrix(d)
    kernel = nullspace_of(positive, tol)
    leak = operator_norm(left @ kernel.basis)
    if leak > tol.residual_tol * max(operator_norm(left), 1.0):
        raise NullspaceViolationError(f"A does not vanish on N(D) (||A z|| = {leak:.3e})")
    domain = range_of(positive, tol)
    operator = PartialOperator(domain=domain, action=left @ pinv(positive, tol) @ domain.basis)
    check_residual("C D = A", relative_residual(operator.extended() @ positive, left), tol.residual_tol)
    return operator


def kaufman_factor_apply(a: Any, d: Any, v: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """A D^+ v for v in R(D)."""
    return kaufman_operator(a, d, tol).apply(v, tol)
