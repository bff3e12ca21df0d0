"""B-symmetric projections: Grammian split, symmetry predicates and constructions, b* = x a."""

from typing import Any, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from orcalc.domains.errors import NoSolutionError, NotSpanningError
from orcalc.domains.numlin.models import (
    DEFAULT_TOLERANCE,
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
    range_of,
    relative_residual,
    same_subspace,
    subspace_sum,
)
from orcalc.domains.proj.models import GammaRep, Projection
from orcalc.domains.proj.services import make_projection, projection_from_matrix
from orcalc.domains.ranges.services import inclusion_residual, range_intersection
from orcalc.domains.schur.services import as_hermitian, block_decompose, image_of_s
from orcalc.domains.weights.models import GrammianSplit


def grammian_split(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> GrammianSplit:
    """Spectral split of basis_S^H B basis_S into its positive and negative parts.

    S+ is the lift of R(G1); S- collects R(G2) and N(G_{B,S}).
    """
    matrix = as_hermitian(b, tol).entries
    gram = hermitian_part(s.basis.conj().T @ matrix @ s.basis)
    if s.is_trivial:
        empty = make_subspace(np.zeros((s.ambient_dim, 0)), s.ambient_dim)
        return GrammianSplit(G1=gram, G2=gram, Splus=empty, Sminus=empty)
    w, v = scipy.linalg.eigh(gram.entries)
    cutoff = tol.rank_cutoff(gram.entries.shape) * operator_norm(matrix)
    positive = w > cutoff
    g1 = hermitian_part((v * np.where(positive, w, 0.0)) @ v.conj().T)
    g2 = hermitian_part((v * np.where(w < -cutoff, -w, 0.0)) @ v.conj().T)
    splus = orthonormalize(s.basis @ v[:, positive], tol, scale=1.0)
    sminus = orthonormalize(s.basis @ v[:, ~positive], tol, scale=1.0)
    check_residual("G = G1 - G2", relative_residual(g1.entries - g2.entries, gram.entries), tol.residual_tol)
    return GrammianSplit(G1=g1, G2=g2, Splus=splus, Sminus=sminus)


def b_symmetry_margins(
    projection: Projection, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> Tuple[float, float]:
    """(max ||P_{BM} n|| over the unit basis of N, relative asymmetry of Q^H B E Q on D(E))."""
    matrix = as_hermitian(b, tol).entries
    image = image_of_s(matrix, projection.range_sub, tol)
    nullspace = projection.null_sub
    subspace_margin = 0.0
    if not image.is_trivial and not nullspace.is_trivial:
        leaked = image.basis @ (image.basis.conj().T @ nullspace.basis)
        subspace_margin = float(np.max(np.linalg.norm(leaked, axis=0)))
    q = projection.domain.basis
    form = q.conj().T @ matrix @ projection.apply(q, tol)
    return subspace_margin, relative_residual(form, adjoint(form))


def is_b_symmetric(projection: Projection, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """N(E) ⊆ (B R(E))^perp, cross-checked against B E = E^H B on D(E)."""
    subspace_margin, operator_margin = b_symmetry_margins(projection, b, tol)
    verdict = subspace_margin <= tol.residual_tol
    operator_verdict = operator_margin <= tol.residual_tol
    if verdict != operator_verdict:
        logger.warning(
            f"B-symmetry routes disagree: subspace margin {subspace_margin:.3e}, "
            f"operator margin {operator_margin:.3e}"
        )
    return verdict


def b_symmetric_construct(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """P_{S // (BS)^perp ∩ L'^perp} with L' = S ∩ (BS)^perp; needs S + (BS)^perp = H."""
    matrix = as_hermitian(b, tol).entries
    image_perp = orthogonal_complement(image_of_s(matrix, s, tol), tol)
    spanned = subspace_sum(s, image_perp, tol=tol)
    if not spanned.is_full:
        raise NotSpanningError(f"S + (BS)^perp has dimension {spanned.dim} < {s.ambient_dim}")
    overlap = range_intersection(s, image_perp, tol)
    nullspace = range_intersection(image_perp, orthogonal_complement(overlap, tol), tol)
    projection = make_projection(s, nullspace, tol)

    kernel_part = range_intersection(s, nullspace_of(matrix, tol, scale=operator_norm(matrix)), tol)
    if not same_subspace(overlap, kernel_part, tol):
        logger.warning("S ∩ (BS)^perp differs from S ∩ N(B)")
    if not is_b_symmetric(projection, matrix, tol):
        logger.warning("constructed projection is not B-symmetric")
    return projection


def commutation_check(
    projection: Projection, b: Any, rep: GammaRep, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> bool:
    """P_Γ commutes with Γ B Γ."""
    if not (
        same_subspace(rep.projection.range_sub, projection.range_sub, tol)
        and same_subspace(rep.projection.null_sub, projection.null_sub, tol)
    ):
        logger.warning("Γ-representation belongs to a different projection")
    matrix = as_hermitian(b, tol).entries
    gamma, pgamma = rep.Gamma.entries, rep.Pgamma.entries
    x = gamma @ matrix @ gamma
    commutator = float(np.linalg.norm(pgamma @ x - x @ pgamma))
    verdict = commutator <= tol.residual_tol * float(np.linalg.norm(x))
    if verdict != is_b_symmetric(projection, matrix, tol):
        logger.warning(f"commutation test ({verdict}) disagrees with the subspace criterion")
    return verdict


def solve_xa(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> PartialOperator:
    """Reduced solution x0 = b^H a^+ of x a = b^H, as an operator R(a) -> S^perp lifted to H."""
    blocks = block_decompose(b, s, tol)
    a, off = blocks.a.entries, blocks.b
    residual = inclusion_residual(off, a, tol)
    if residual > tol.residual_tol:
        raise NoSolutionError(f"R(b) is not contained in R(a) (residual {residual:.3e})")
    x0 = off.conj().T @ pinv(a, tol)
    check_residual("x0 a = b^H", relative_residual(x0 @ a, off.conj().T), tol.residual_tol)
    domain = orthonormalize(s.basis @ range_of(a, tol).basis, tol, scale=1.0)
    action = blocks.Sperp.basis @ x0 @ s.basis.conj().T @ domain.basis
    return PartialOperator(domain=domain, action=action)


def xa_projection(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Projection:
    """E = [[I, x0^H], [0, 0]] in the (S, S^perp) bases; B-symmetric onto S."""
    x0 = solve_xa(b, s, tol)
    sperp = orthogonal_complement(s, tol)
    # x0^H maps S^perp into R(a) ⊆ S.
    x0_adjoint = adjoint(x0.extended())
    matrix = s.projector_matrix() + x0_adjoint @ sperp.projector_matrix()
    projection = projection_from_matrix(matrix, tol=tol)
    if not is_b_symmetric(projection, b, tol):
        logger.warning("x0 projection is not B-symmetric")
    return projection
