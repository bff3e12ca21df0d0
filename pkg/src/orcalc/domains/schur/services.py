"""Block decomposition, complementability predicates, Riccati witness and the Schur complement.

All blocks are read off W^H B W with W = [S | S^perp] and denoised against ||B||,
so that a block which is numerically zero relative to B is exactly zero.
"""

from typing import Any, Literal, Optional, Tuple

import numpy as np
from loguru import logger

from orcalc.domains.errors import NoSolutionError, NotWeaklyComplementableError
from orcalc.domains.numlin.models import DEFAULT_TOLERANCE, HermitianOperator, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import (
    check_residual,
    hermitian_part,
    is_psd,
    min_eigenvalue,
    operator_norm,
    orthogonal_complement,
    polar_selfadjoint,
    range_of,
    relative_residual,
    require_same_ambient,
    sqrt_psd,
    subspace_sum,
    truncate,
    truncate_hermitian,
)
from orcalc.domains.ranges.services import (
    douglas_reduced,
    inclusion_residual,
    range_included,
    range_intersection,
    subspace_margin,
)
from orcalc.domains.schur.models import BlockDecomposition, ComplementabilityMargins, WeakWitness

ZeroSign = Literal[1, -1]


def as_hermitian(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> HermitianOperator:
    if isinstance(value, HermitianOperator):
        return value
    return HermitianOperator.from_matrix(value, tol)


def block_decompose(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> BlockDecomposition:
    """B = [[a, b], [b^H, c]] in the canonical (S, S^perp) bases."""
    operator = as_hermitian(b, tol)
    require_same_ambient(operator.entries, s.basis)
    matrix = operator.entries
    sperp = orthogonal_complement(s, tol)
    scale = operator_norm(matrix)
    top = s.basis.conj().T @ matrix
    bottom = sperp.basis.conj().T @ matrix
    blocks = BlockDecomposition(
        S=s,
        Sperp=sperp,
        a=truncate_hermitian(top @ s.basis, tol, scale),
        b=truncate(top @ sperp.basis, tol, scale),
        c=truncate_hermitian(bottom @ sperp.basis, tol, scale),
        scale=scale,
    )
    check_residual("block reassembly", relative_residual(blocks.reassemble(), matrix), tol.residual_tol)
    return blocks


def relative_outside(b: np.ndarray, a: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> float:
    """||(I - P_R(A)) b|| / ||b||; zero when b = 0."""
    size = float(np.linalg.norm(b))
    if size == 0.0:
        return 0.0
    return inclusion_residual(b, a, tol) * max(size, 1.0) / size


def image_of_s(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    """B S as a canonical subspace, rank decided against ||B||."""
    matrix = as_hermitian(b, tol).entries
    return range_of(matrix @ s.basis, tol, scale=operator_norm(matrix))


def is_complementable(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """R(b) ⊆ R(a), cross-checked against H = S + (BS)^perp."""
    blocks = block_decompose(b, s, tol)
    verdict = range_included(blocks.b, blocks.a.entries, tol)
    geometric = subspace_sum(s, orthogonal_complement(image_of_s(b, s, tol), tol), tol=tol).is_full
    if verdict != geometric:
        logger.warning(f"complementability routes disagree: block {verdict}, geometric {geometric}")
    return verdict


def weak_witness(
    b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE, zero_sign: ZeroSign = 1
) -> WeakWitness:
    """u, |a|^{1/2} and the reduced solution f of b = |a|^{1/2} x."""
    blocks = block_decompose(b, s, tol)
    u, modulus = polar_selfadjoint(blocks.a, tol, zero_sign)
    absa_half = sqrt_psd(modulus, tol)
    try:
        f = douglas_reduced(absa_half.entries, blocks.b, tol)
    except NoSolutionError as exc:
        raise NotWeaklyComplementableError(f"R(b) is not contained in R(|a|^{{1/2}}): {exc}") from exc
    check_residual(
        "a = u |a|",
        relative_residual(u.entries @ absa_half.entries @ absa_half.entries, blocks.a.entries),
        tol.residual_tol,
    )
    return WeakWitness(u=u, absa_half=absa_half, f=f, blocks=blocks)


def is_weakly_complementable(
    b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE, zero_sign: ZeroSign = 1
) -> Tuple[bool, Optional[WeakWitness]]:
    """R(b) ⊆ R(|a|^{1/2}), with the witness when it holds."""
    try:
        return True, weak_witness(b, s, tol, zero_sign)
    except NotWeaklyComplementableError as exc:
        logger.debug(str(exc))
        return False, None


def is_quasi_complementable(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """BS ∩ S^perp = {0} (closures are ranges here)."""
    return range_intersection(image_of_s(b, s, tol), orthogonal_complement(s, tol), tol).is_trivial


def complementability_margins(
    b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> ComplementabilityMargins:
    blocks = block_decompose(b, s, tol)
    _, modulus = polar_selfadjoint(blocks.a, tol)
    return ComplementabilityMargins(
        complementable=relative_outside(blocks.b, blocks.a.entries, tol),
        weak=relative_outside(blocks.b, sqrt_psd(modulus, tol).entries, tol),
        quasi=subspace_margin(image_of_s(b, s, tol), blocks.Sperp),
    )


def riccati_witness(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> HermitianOperator:
    """PSD A with B P_S B = A P_S A, namely A = Z^H Z for Z = [u |a|^{1/2}, f]."""
    witness = weak_witness(b, s, tol)
    blocks = witness.blocks
    half = witness.absa_half.entries
    z = np.hstack([witness.u.entries @ half, witness.f])
    w = blocks.basis()
    solution = hermitian_part(w @ (z.conj().T @ z) @ w.conj().T)

    matrix = as_hermitian(b, tol).entries
    p_s = s.projector_matrix()
    left = matrix @ p_s @ matrix
    right = solution.entries @ p_s @ solution.entries
    bound = tol.residual_tol * max(blocks.scale**2, 1.0)
    check_residual("B P_S B = A P_S A", float(np.linalg.norm(left - right)), bound)
    if not is_psd(solution, tol):
        logger.warning("Riccati witness fails the spectral positivity test")
    if not positivity_blocks(solution, s, tol):
        logger.warning("Riccati witness fails the block positivity test")
    return solution


def positivity_blocks(b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """a >= 0, R(b) ⊆ R(a^{1/2}) and t = c - f^H f >= 0."""
    blocks = block_decompose(b, s, tol)
    scale = max(blocks.scale, 1.0)
    verdict = False
    if is_psd(blocks.a, tol, scale):
        _, modulus = polar_selfadjoint(blocks.a, tol)
        half = sqrt_psd(modulus, tol).entries
        if range_included(blocks.b, half, tol):
            f = douglas_reduced(half, blocks.b, tol)
            verdict = is_psd(blocks.c.entries - f.conj().T @ f, tol, scale)
    spectral = min_eigenvalue(as_hermitian(b, tol)) >= -tol.residual_tol * scale
    if verdict != spectral:
        logger.warning(f"positivity routes disagree: blocks {verdict}, spectrum {spectral}")
    return verdict


def schur_core(witness: WeakWitness) -> HermitianOperator:
    """c - f^H u f on S^perp coordinates."""
    f = witness.f
    return hermitian_part(witness.blocks.c.entries - f.conj().T @ witness.u.entries @ f)


def schur_complement(
    b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE, zero_sign: ZeroSign = 1
) -> HermitianOperator:
    """B_{/S} = [[0, 0], [0, c - f^H u f]], eigenvalues below the cutoff relative to ||B|| dropped."""
    witness = weak_witness(b, s, tol, zero_sign)
    sperp = witness.blocks.Sperp.basis
    core = truncate_hermitian(schur_core(witness), tol, witness.blocks.scale)
    return hermitian_part(sperp @ core.entries @ sperp.conj().T)


def compression(
    b: Any, s: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE, zero_sign: ZeroSign = 1
) -> HermitianOperator:
    """B_S = B - B_{/S}."""
    return hermitian_part(as_hermitian(b, tol).entries - schur_complement(b, s, tol, zero_sign).entries)
