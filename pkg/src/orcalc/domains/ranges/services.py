"""Operator-range algebra: sums, intersections, inclusions, range norms and factorizations."""

from typing import Any, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from orcalc.domains.errors import NoSolutionError, NotContractionError, NotInRangeError
from orcalc.domains.numlin.models import DEFAULT_TOLERANCE, HermitianOperator, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import (
    as_matrix,
    check_residual,
    make_subspace,
    nullspace_of,
    operator_norm,
    orthonormalize,
    pinv,
    range_of,
    require_same_ambient,
    sqrt_psd,
)
from orcalc.domains.ranges.models import RangeNormContext


def range_sum(a: Any, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Tuple[Subspace, HermitianOperator]:
    """R(A) + R(B) = R((AA* + BB*)^{1/2})."""
    require_same_ambient(a, b)
    left, right = as_matrix(a), as_matrix(b)
    t = sqrt_psd(left @ left.conj().T + right @ right.conj().T, tol)
    return range_of(t.entries, tol), t


def range_intersection(a: Any, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    """R(A) ∩ R(B) from the nullspace of the stacked system [U_A, -U_B]."""
    ambient = require_same_ambient(a, b)
    first = a if isinstance(a, Subspace) else range_of(a, tol)
    second = b if isinstance(b, Subspace) else range_of(b, tol)
    if first.is_trivial or second.is_trivial:
        return make_subspace(np.zeros((ambient, 0)), ambient)
    stacked = np.hstack([first.basis, -second.basis])
    kernel = nullspace_of(stacked, tol, scale=1.0)
    return orthonormalize(first.basis @ kernel.basis[: first.dim], tol, scale=1.0)


def inclusion_residual(b: Any, a: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> float:
    """||(I - P_R(A)) B|| / max(||B||, 1)."""
    require_same_ambient(a, b)
    target = as_matrix(b)
    subspace = a if isinstance(a, Subspace) else range_of(a, tol)
    outside = target - subspace.basis @ (subspace.basis.conj().T @ target)
    return float(np.linalg.norm(outside) / max(np.linalg.norm(target), 1.0))


def range_included(b: Any, a: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """R(B) ⊆ R(A), i.e. AX = B is solvable."""
    return inclusion_residual(b, a, tol) <= tol.residual_tol


def douglas_reduced(a: Any, b: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Reduced solution D of AD = B, the unique one with R(D) ⊆ R(A*)."""
    residual = inclusion_residual(b, a, tol)
    if residual > tol.residual_tol:
        raise NoSolutionError(f"R(B) is not contained in R(A) (residual {residual:.3e})")
    left, right = as_matrix(a), as_matrix(b)
    d = pinv(left, tol) @ right
    check_residual("douglas AD = B", float(np.linalg.norm(left @ d - right)), tol.residual_tol * max(float(np.linalg.norm(right)), 1.0))
    return d


def range_norm_context(t: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> RangeNormContext:
    matrix = as_matrix(t)
    return RangeNormContext(T=matrix, Tpinv=pinv(matrix, tol))


def _require_in_range(u: np.ndarray, t: Any, tol: TolerancePolicy) -> None:
    residual = inclusion_residual(u, t, tol)
    if residual > tol.residual_tol:
        raise NotInRangeError(f"vector is not in the operator range (residual {residual:.3e})")


def mt_norm(ctx: RangeNormContext, u: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> float:
    """||u||_T = ||T^+ u|| for u in R(T)."""
    vector = as_matrix(u)
    _require_in_range(vector, ctx.T, tol)
    return float(np.linalg.norm(ctx.Tpinv @ vector))


def ando_decompose(t1: Any, t2: Any, u: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """Unique split u = u1 + u2, u_i in R(T_i), with ||u||_T^2 = ||u1||_T1^2 + ||u2||_T2^2.

    Realized as the minimum-norm solution of [T1 T2] (x1; x2) = u, u_i = T_i x_i.
    """
    require_same_ambient(t1, t2, u)
    first, second = as_matrix(t1), as_matrix(t2)
    vector = np.array(u, dtype=complex).reshape(-1)
    joint = np.hstack([first, second])
    _require_in_range(vector, joint, tol)
    x = pinv(joint, tol) @ vector
    split = first.shape[1]
    u1, u2 = first @ x[:split], second @ x[split:]
    logger.debug(f"ando split: ||u1|| = {np.linalg.norm(u1):.3e}, ||u2|| = {np.linalg.norm(u2):.3e}")
    return u1, u2


def debranges_complement(t: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    """R((I - TT*)^{1/2}), the complementary space of the contraction T."""
    matrix = as_matrix(t)
    size = operator_norm(matrix)
    if size > 1.0 + tol.residual_tol:
        raise NotContractionError(f"||T|| = {size:.6f} exceeds 1")
    defect = np.eye(matrix.shape[0]) - matrix @ matrix.conj().T
    w, v = scipy.linalg.eigh((defect + defect.conj().T) / 2.0)
    root = sqrt_psd((v * np.clip(w, 0.0, None)) @ v.conj().T, tol)
    return range_of(root.entries, tol)


def subspace_margin(first: Subspace, second: Subspace) -> float:
    """Sine of the smallest principal angle between two subspaces; 1.0 if one is trivial."""
    if first.is_trivial or second.is_trivial:
        return 1.0
    angles = scipy.linalg.subspace_angles(first.basis, second.basis)
    return float(np.sin(np.min(angles)))
