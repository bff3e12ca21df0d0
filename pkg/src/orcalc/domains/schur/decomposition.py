"""The B = B1 + B2 - B3 decomposition and the B-symmetric projection split it induces."""

from typing import Any, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from orcalc.domains.errors import NotBSymmetricError
from orcalc.domains.numlin.models import DEFAULT_TOLERANCE, HermitianOperator, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import (
    check_residual,
    hermitian_part,
    is_psd,
    range_of,
    relative_residual,
    same_subspace,
    spectral_parts,
    sqrt_psd,
)
from orcalc.domains.proj.models import Projection
from orcalc.domains.proj.services import projection_from_matrix
from orcalc.domains.schur.models import BlockDecomposition, WeakDecomposition
from orcalc.domains.schur.services import as_hermitian, schur_complement, weak_witness
from orcalc.domains.weights.services import grammian_split, is_b_symmetric


def _vanishes_on(operator: HermitianOperator, subspace: Subspace, scale: float) -> float:
    if subspace.is_trivial:
        return 0.0
    return float(np.linalg.norm(operator.entries @ subspace.basis)) / max(scale, 1.0)


def _signed_parts(blocks: BlockDecomposition, tol: TolerancePolicy) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """(a+^{1/2}, P_{R(a+)}) and (a-^{1/2}, P_{R(a-)}), zero eigenvalues decided against ||B||."""
    a = blocks.a.entries
    if a.size == 0:
        return (a, a), (a, a)
    w, v = scipy.linalg.eigh(a)
    cutoff = tol.rank_cutoff(a.shape) * blocks.scale
    parts = []
    for mask, values in ((w > cutoff, w), (w < -cutoff, -w)):
        kept = v[:, mask]
        half = (kept * np.sqrt(values[mask])) @ kept.conj().T
        parts.append((half, kept @ kept.conj().T))
    return tuple(parts)


def weak_decomposition(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> WeakDecomposition:
    """B2 = Z+^H Z+ and B3 = Z-^H Z- with Z± = [a±^{1/2}, ±P_{R(a±)} f]; B1 = B - B2 + B3 = B_{/S}."""
    witness = weak_witness(b, s, tol)
    blocks = witness.blocks
    (half_plus, p_plus), (half_minus, p_minus) = _signed_parts(blocks, tol)
    z_plus = np.hstack([half_plus, p_plus @ witness.f])
    z_minus = np.hstack([half_minus, -p_minus @ witness.f])

    w = blocks.basis()
    b2 = hermitian_part(w @ (z_plus.conj().T @ z_plus) @ w.conj().T)
    b3 = hermitian_part(w @ (z_minus.conj().T @ z_minus) @ w.conj().T)
    matrix = as_hermitian(b, tol).entries
    b1 = hermitian_part(matrix - b2.entries + b3.entries)

    split = grammian_split(matrix, s, tol)
    bound = tol.residual_tol
    scale = blocks.scale
    if not (is_psd(b2, tol) and is_psd(b3, tol)):
        logger.warning("B2 or B3 is not positive semidefinite")
    check_residual("S ⊆ N(B1)", _vanishes_on(b1, s, scale), bound)
    check_residual("S- ⊆ N(B2)", _vanishes_on(b2, split.Sminus, scale), bound)
    check_residual("S+ ⊆ N(B3)", _vanishes_on(b3, split.Splus, scale), bound)
    check_residual("B1 = B_{/S}", relative_residual(b1.entries, schur_complement(matrix, s, tol).entries), bound)
    return WeakDecomposition(b1=b1, b2=b2, b3=b3)


def _require_b_symmetric_onto(projection: Projection, b: Any, s: Subspace, tol: TolerancePolicy) -> None:
    if not same_subspace(projection.range_sub, s, tol):
        raise NotBSymmetricError("R(E) differs from S")
    if not is_b_symmetric(projection, b, tol):
        raise NotBSymmetricError("E is not B-symmetric")


def _folded_half(operator: HermitianOperator, subspace: Subspace, tol: TolerancePolicy) -> np.ndarray:
    """C^{1/2} P_M C^{1/2} with M = C^{1/2}(subspace)."""
    half = sqrt_psd(spectral_parts(operator)[0], tol).entries
    if subspace.is_trivial:
        return np.zeros_like(half)
    image = range_of(half @ subspace.basis, tol)
    return half @ image.projector_matrix() @ half


def closure_extension(projection: Projection, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> HermitianOperator:
    """B E extended to H: B2^{1/2} P_{M2} B2^{1/2} - B3^{1/2} P_{M3} B3^{1/2}.

    M2 = B2^{1/2} S+ and M3 = B3^{1/2} S-; the closures are plain ranges here.
    """
    s = projection.range_sub
    matrix = as_hermitian(b, tol).entries
    _require_b_symmetric_onto(projection, matrix, s, tol)
    parts = weak_decomposition(matrix, s, tol)
    split = grammian_split(matrix, s, tol)
    extension = hermitian_part(
        _folded_half(parts.b2, split.Splus, tol) - _folded_half(parts.b3, split.Sminus, tol)
    )
    vectors = projection.domain.basis
    check_residual(
        "extension = B E on D(E)",
        relative_residual(extension.entries @ vectors, matrix @ projection.apply(vectors, tol)),
        tol.residual_tol,
    )
    return extension


def bsym_split(
    projection: Projection, b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> Tuple[Projection, Projection]:
    """E = E+ + E- with E± = P_{S±} E, E+ B2-symmetric and E- B3-symmetric."""
    matrix = as_hermitian(b, tol).entries
    _require_b_symmetric_onto(projection, matrix, s, tol)
    split = grammian_split(matrix, s, tol)
    parts = weak_decomposition(matrix, s, tol)
    full = projection.matrix()
    plus = projection_from_matrix(split.Splus.projector_matrix() @ full, domain=projection.domain, tol=tol)
    minus = projection_from_matrix(split.Sminus.projector_matrix() @ full, domain=projection.domain, tol=tol)

    bound = tol.residual_tol
    zero = np.zeros_like(plus.base.action)
    check_residual("E+ E- = 0", relative_residual(plus.apply(minus.base.action, tol, 1.0), zero), bound)
    check_residual("E- E+ = 0", relative_residual(minus.apply(plus.base.action, tol, 1.0), zero), bound)
    if not (same_subspace(plus.range_sub, split.Splus, tol) and same_subspace(minus.range_sub, split.Sminus, tol)):
        logger.warning("ranges of E+ and E- differ from S+ and S-")
    if not is_b_symmetric(plus, parts.b2, tol):
        logger.warning("E+ is not B2-symmetric")
    if not is_b_symmetric(minus, parts.b3, tol):
        logger.warning("E- is not B3-symmetric")
    return plus, minus
