"""E0 and the family P*(B, S) of projections with B_{/S} = (I - E) B."""

from typing import Any, List, Optional

import numpy as np
from loguru import logger

from orcalc.domains.errors import (
    InadmissibleWError,
    NotInDomainError,
    NotMemberError,
    NotSpanningError,
    WrongNullspaceError,
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
    check_residual,
    hermitian_part,
    make_subspace,
    nullspace_of,
    operator_norm,
    orthogonal_complement,
    orthonormalize,
    pinv,
    polar_selfadjoint,
    range_of,
    relative_residual,
    same_subspace,
    sqrt_psd,
    subspace_sum,
    truncate,
    truncate_hermitian,
)
from orcalc.domains.proj.models import Projection
from orcalc.domains.proj.services import block_rep, projection_from_matrix
from orcalc.domains.ranges.services import inclusion_residual, range_included
from orcalc.domains.schur.models import OrderKind
from orcalc.domains.schur.orders import order_check
from orcalc.domains.schur.services import (
    as_hermitian,
    block_decompose,
    image_of_s,
    schur_complement,
    schur_core,
    weak_witness,
)
from orcalc.domains.weights.services import b_symmetric_construct


def e0_projection(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """E0 = [[I, 0], [y0, 0]] with y0 = f^H u (|a|^{1/2})^+."""
    witness = weak_witness(b, s, tol)
    sperp = witness.blocks.Sperp.basis
    y0 = witness.f.conj().T @ witness.u.entries @ pinv(witness.absa_half.entries, tol)
    matrix = s.projector_matrix() + sperp @ y0 @ s.basis.conj().T
    projection = projection_from_matrix(matrix, tol=tol)

    product = matrix @ as_hermitian(b, tol).entries
    check_residual("E0 B Hermitian", relative_residual(product, adjoint(product)), tol.residual_tol)
    if not same_subspace(projection.null_sub, witness.blocks.Sperp, tol):
        logger.warning("N(E0) differs from S^perp")
    return projection


def e0_gamma(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> HermitianOperator:
    """Γ = diag(|a|^{1/2} + P_{N(a)}, I) with R(Γ) = D(E0); E0 Γ is bounded."""
    witness = weak_witness(b, s, tol)
    half = witness.absa_half.entries
    kernel = nullspace_of(half, tol).projector_matrix()
    sperp = witness.blocks.Sperp.basis
    gamma = hermitian_part(s.basis @ (half + kernel) @ s.basis.conj().T + sperp @ sperp.conj().T)
    y0 = witness.f.conj().T @ witness.u.entries @ pinv(half, tol)
    logger.debug(f"||E0 Γ|| on S = {np.linalg.norm(y0 @ (half + kernel), 2) if y0.size else 0.0:.3e}")
    return gamma


def pstar_membership(
    projection: Projection, b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> bool:
    """y a = b^H with R(|a|^{1/2}) ⊆ D(y), where E = [[I, 0], [y, 0]] and N(E) = S^perp."""
    blocks = block_decompose(b, s, tol)
    if not same_subspace(projection.null_sub, blocks.Sperp, tol):
        raise WrongNullspaceError("N(E) differs from S^perp")
    y = block_rep(projection, "nullspace", tol)
    _, modulus = polar_selfadjoint(blocks.a, tol)
    lifted = s.basis @ range_of(sqrt_psd(modulus, tol).entries, tol).basis

    verdict = y.domain_residual(lifted) <= tol.residual_tol
    if verdict:
        image = y.apply(s.basis @ blocks.a.entries, tol, blocks.scale)
        verdict = relative_residual(image, blocks.Sperp.basis @ adjoint(blocks.b)) <= tol.residual_tol
    else:
        logger.debug("R(|a|^{1/2}) is not contained in D(y)")

    if verdict:
        try:
            yb = blocks.Sperp.basis.conj().T @ y.apply(s.basis @ blocks.b, tol, blocks.scale)
            check_residual("y b Hermitian", relative_residual(yb, adjoint(yb)), tol.residual_tol)
        except NotInDomainError:
            logger.warning("R(b) is not contained in D(y)")
    geometric = range_included(as_hermitian(b, tol).entries @ s.basis, projection.range_sub, tol)
    if verdict != geometric:
        logger.warning(f"membership routes disagree: y a = b^H {verdict}, B S ⊆ R(E) {geometric}")
    return verdict


def pstar0_perturb(
    b: Any,
    s: Subspace,
    w: PartialOperator,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    e0: Optional[Projection] = None,
) -> Projection:
    """E0 + W for W with D(E0) ⊆ D(W), R(W) ⊆ S^perp and B S + S^perp ⊆ N(W).

    ``e0`` may be passed in when perturbing the same (B, S) repeatedly.
    """
    e0 = e0 if e0 is not None else e0_projection(b, s, tol)
    matrix = as_hermitian(b, tol).entries
    sperp = orthogonal_complement(s, tol)

    residual = w.domain_residual(e0.domain.basis)
    if residual > tol.residual_tol:
        raise InadmissibleWError("D(E0) is not contained in D(W)", residual)
    residual = inclusion_residual(w.action, sperp, tol)
    if residual > tol.residual_tol:
        raise InadmissibleWError("R(W) is not contained in S^perp", residual)
    kernel = np.hstack([matrix @ s.basis, sperp.basis])
    images = w.apply(kernel, tol)
    residual = float(np.linalg.norm(images)) / max(float(np.linalg.norm(kernel)), 1.0)
    if residual > tol.residual_tol:
        raise InadmissibleWError("B S + S^perp is not contained in N(W)", residual)

    projection = projection_from_matrix(e0.matrix() + w.extended(), domain=e0.domain, tol=tol)
    # R(B) ⊆ B S + S^perp, so W B = 0 and (I - E) B = (I - E0) B.
    scale = max(float(np.linalg.norm(matrix)), 1.0)
    check_residual("W B = 0", float(np.linalg.norm(w.apply(matrix, tol, scale))) / scale, tol.residual_tol)
    return projection


def random_admissible_w(
    b: Any, s: Subspace, rng: np.random.Generator, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> PartialOperator:
    """W = S^perp Z K^H with K an orthonormal basis of (B S + S^perp)^perp."""
    sperp = orthogonal_complement(s, tol)
    allowed = orthogonal_complement(subspace_sum(image_of_s(b, s, tol), sperp, tol=tol), tol)
    z = rng.standard_normal((sperp.dim, allowed.dim))
    full = make_subspace(np.eye(s.ambient_dim, dtype=complex), s.ambient_dim)
    return PartialOperator(domain=full, action=sperp.basis @ z @ allowed.basis.conj().T)


def schur_via_projection(
    b: Any,
    s: Subspace,
    projection: Projection,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    reference: Optional[HermitianOperator] = None,
) -> HermitianOperator:
    """(I - E) B for E in P*(B, S), checked against ``reference`` or the block formula."""
    try:
        member = pstar_membership(projection, b, s, tol)
    except WrongNullspaceError as exc:
        raise NotMemberError(str(exc)) from exc
    if not member:
        raise NotMemberError("E does not belong to P*(B, S)")
    matrix = as_hermitian(b, tol).entries
    try:
        result = matrix - projection.apply(matrix, tol, operator_norm(matrix))
    except NotInDomainError as exc:
        raise NotMemberError("R(B) is not contained in D(E)") from exc
    complement = truncate_hermitian(result, tol, operator_norm(matrix))
    expected = reference if reference is not None else schur_complement(matrix, s, tol)
    check_residual(
        "(I - E) B = B_{/S}",
        relative_residual(complement.entries, expected.entries),
        tol.residual_tol,
    )
    return complement


def _symmetric_schur_factors(
    b: Any, s: Subspace, rng: np.random.Generator, tol: TolerancePolicy
) -> Optional[np.ndarray]:
    """G t with G = F^H for a random t-symmetric projection F on S^perp coordinates."""
    witness = weak_witness(b, s, tol)
    core = schur_core(witness)
    size = core.dim
    if size == 0:
        return None
    rank = int(rng.integers(0, size + 1))
    target = orthonormalize(rng.standard_normal((size, rank)), tol, scale=1.0)
    try:
        symmetric = b_symmetric_construct(core, target, tol)
    except NotSpanningError:
        return None
    g = adjoint(symmetric.matrix())
    sperp = witness.blocks.Sperp.basis
    return sperp @ g @ core.entries @ sperp.conj().T


def m_set_sample(
    b: Any, s: Subspace, count: int, seed: int, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> List[HermitianOperator]:
    """Deterministic sample of M(B, S) = {X = Q B Hermitian with R(X) ⊆ S^perp}.

    Always contains B_{/S} (Q = I - E0) and 0 (Q = 0).
    """
    rng = np.random.default_rng(seed)
    matrix = as_hermitian(b, tol).entries
    scale = operator_norm(matrix)
    e0 = e0_projection(matrix, s, tol)
    sperp = orthogonal_complement(s, tol)
    candidates = [matrix - e0.apply(matrix, tol), np.zeros_like(matrix)]
    for _ in range(count):
        w = random_admissible_w(matrix, s, rng, tol)
        member = pstar0_perturb(matrix, s, w, tol, e0=e0)
        candidates.append(matrix - member.apply(matrix, tol))
        product = _symmetric_schur_factors(matrix, s, rng, tol)
        if product is not None:
            candidates.append(product)

    sample: List[HermitianOperator] = []
    for raw in candidates:
        candidate = truncate(raw, tol, scale)
        if relative_residual(candidate, adjoint(candidate)) > tol.residual_tol:
            continue
        if inclusion_residual(candidate, sperp, tol) > tol.residual_tol:
            continue
        if any(relative_residual(candidate, kept.entries) <= tol.residual_tol for kept in sample):
            continue
        sample.append(hermitian_part(candidate))
    logger.debug(f"M(B, S) sample: {len(sample)} distinct members from {len(candidates)} candidates")
    return sample


def max_check(
    b: Any,
    s: Subspace,
    sample: List[HermitianOperator],
    candidate: Optional[Any] = None,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> bool:
    """Every sampled X satisfies X ≺ B_{/S}, and B_{/S} belongs to the sample."""
    matrix = as_hermitian(b, tol).entries
    scale = operator_norm(matrix)
    maximum = np.asarray(candidate if candidate is not None else schur_complement(matrix, s, tol).entries, dtype=complex)
    if not any(relative_residual(member.entries, maximum) <= tol.residual_tol for member in sample):
        logger.info("candidate maximum is not in the sample")
        return False
    for member in sample:
        if not order_check(OrderKind.PREC, member.entries, maximum, tol, scale):
            logger.info("sample member is not below the candidate maximum")
            return False
    return True
