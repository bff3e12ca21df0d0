"""Dense linear algebra services: canonical subspaces, pseudoinverses, square roots, polar factors.

Every rank decision goes through :meth:`TolerancePolicy.rank_cutoff`, so that all
"R(X) is contained in R(Y)" answers made anywhere in the library are mutually
consistent. Functions taking a ``scale`` argument measure singular values (or
eigenvalues) against ``scale`` instead of the largest one of their own argument;
callers pass the norm of a parent operator when they work with one of its blocks.
"""

from typing import Any, Literal, Optional, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from orcalc.domains.errors import DimensionMismatchError, NotPositiveError
from orcalc.domains.numlin.models import (
    DEFAULT_TOLERANCE,
    HermitianOperator,
    Subspace,
    TolerancePolicy,
)


def as_matrix(value: Any) -> np.ndarray:
    """Returns ``value`` as a complex 2D array; vectors become columns."""
    if isinstance(value, Subspace):
        return np.array(value.basis, dtype=complex)
    matrix = np.array(value, dtype=complex)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got an array of dimension {matrix.ndim}")
    return matrix


def adjoint(value: Any) -> np.ndarray:
    return as_matrix(value).conj().T


def operator_norm(value: Any) -> float:
    """Spectral norm; zero for empty matrices."""
    matrix = as_matrix(value)
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.norm(matrix, 2))


def relative_residual(x: Any, y: Any) -> float:
    """||X - Y||_F / max(||X||_F, ||Y||_F, 1)."""
    left, right = as_matrix(x), as_matrix(y)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"cannot compare shapes {left.shape} and {right.shape}")
    if left.size == 0:
        return 0.0
    denominator = max(np.linalg.norm(left), np.linalg.norm(right), 1.0)
    return float(np.linalg.norm(left - right) / denominator)


def check_residual(name: str, value: float, bound: float) -> bool:
    """Logs a verified identity and tells whether it holds."""
    if value <= bound:
        logger.debug(f"{name}: residual {value:.3e} <= {bound:.1e}")
        return True
    logger.warning(f"{name}: residual {value:.3e} exceeds {bound:.1e}")
    return False


def require_same_ambient(*values: Any) -> int:
    """Returns the common number of rows of the operands."""
    rows = {as_matrix(value).shape[0] for value in values}
    if len(rows) != 1:
        raise DimensionMismatchError(f"operands live in spaces of dimensions {sorted(rows)}")
    return rows.pop()


def _threshold(singular_values: np.ndarray, shape: Tuple[int, ...], tol: TolerancePolicy, scale: Optional[float]) -> float:
    reference = scale if scale is not None else float(np.max(singular_values, initial=0.0))
    return tol.rank_cutoff(shape) * reference


def _fix_phase(columns: np.ndarray) -> np.ndarray:
    # Largest-modulus entry of each column made real positive; first index wins ties.
    fixed = columns.copy()
    for j in range(fixed.shape[1]):
        pivot = int(np.argmax(np.abs(fixed[:, j])))
        entry = fixed[pivot, j]
        if entry != 0:
            fixed[:, j] *= np.conj(entry) / abs(entry)
    return fixed


def _svd_split(
    matrix: np.ndarray, tol: TolerancePolicy, scale: Optional[float]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Full SVD plus the numerical rank."""
    rows, cols = matrix.shape
    if matrix.size == 0:
        return np.eye(rows, dtype=complex), np.zeros(0), np.eye(cols, dtype=complex), 0
    u, s, vh = scipy.linalg.svd(matrix, full_matrices=True)
    cutoff = _threshold(s, matrix.shape, tol, scale)
    rank = int(np.sum(s > cutoff))
    return u, s, vh, rank


def make_subspace(columns: np.ndarray, ambient_dim: int, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    basis = np.asarray(columns, dtype=complex).reshape(ambient_dim, -1)
    return Subspace.model_validate({"ambient_dim": ambient_dim, "basis": basis}, context={"tol": tol})


def orthonormalize(span: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> Subspace:
    """Canonical orthonormal basis of the column space of ``span``."""
    matrix = as_matrix(span)
    u, _, _, rank = _svd_split(matrix, tol, scale)
    return make_subspace(_fix_phase(u[:, :rank]), matrix.shape[0], tol)


def range_of(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> Subspace:
    """R(A)."""
    return orthonormalize(value, tol, scale)


def nullspace_of(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> Subspace:
    """N(A)."""
    matrix = as_matrix(value)
    _, _, vh, rank = _svd_split(matrix, tol, scale)
    return make_subspace(_fix_phase(vh[rank:].conj().T), matrix.shape[1], tol)


def orthogonal_complement(subspace: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    """S^perp, computed as N(basis^H)."""
    if subspace.is_trivial:
        return make_subspace(np.eye(subspace.ambient_dim, dtype=complex), subspace.ambient_dim)
    return nullspace_of(subspace.basis.conj().T, tol, scale=1.0)


def subspace_sum(*subspaces: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> Subspace:
    """S_1 + ... + S_m as a canonical subspace."""
    ambient = require_same_ambient(*(s.basis for s in subspaces))
    stacked = np.hstack([s.basis for s in subspaces]) if subspaces else np.zeros((ambient, 0))
    return orthonormalize(stacked, tol, scale=1.0)


def projector(subspace: Subspace) -> HermitianOperator:
    """Orthogonal projector P_S = basis basis^H."""
    return HermitianOperator(entries=subspace.projector_matrix())


def contains(subspace: Subspace, vectors: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """||(I - P_S) V|| <= residual_tol * max(||V||, 1)."""
    columns = as_matrix(vectors)
    outside = columns - subspace.basis @ (subspace.basis.conj().T @ columns)
    return float(np.linalg.norm(outside)) <= tol.residual_tol * max(float(np.linalg.norm(columns)), 1.0)


def same_subspace(first: Subspace, second: Subspace, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    if first.ambient_dim != second.ambient_dim or first.dim != second.dim:
        return False
    return relative_residual(first.projector_matrix(), second.projector_matrix()) <= tol.residual_tol


def pinv(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> np.ndarray:
    """Moore-Penrose inverse with rank decided by the shared cutoff."""
    matrix = as_matrix(value)
    if matrix.size == 0:
        return np.zeros((matrix.shape[1], matrix.shape[0]), dtype=complex)
    singular_values = scipy.linalg.svdvals(matrix)
    cutoff = _threshold(singular_values, matrix.shape, tol, scale)
    return scipy.linalg.pinv(matrix, atol=cutoff, rtol=0.0)


def truncate(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> np.ndarray:
    """Drops the singular values below the cutoff."""
    matrix = as_matrix(value)
    u, s, vh, rank = _svd_split(matrix, tol, scale)
    return (u[:, :rank] * s[:rank]) @ vh[:rank]


def _hermitian_entries(value: Any) -> np.ndarray:
    # Internal results are Hermitian up to rounding; user input is checked by HermitianOperator.from_matrix.
    if isinstance(value, HermitianOperator):
        return np.array(value.entries)
    matrix = as_matrix(value)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {matrix.shape}")
    return (matrix + matrix.conj().T) / 2.0


def truncate_hermitian(
    value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None
) -> HermitianOperator:
    """Drops the eigenvalues below the cutoff in modulus."""
    matrix = _hermitian_entries(value)
    if matrix.size == 0:
        return HermitianOperator(entries=matrix)
    w, v = scipy.linalg.eigh(matrix)
    cutoff = _threshold(np.abs(w), matrix.shape, tol, scale)
    kept = np.where(np.abs(w) > cutoff, w, 0.0)
    return HermitianOperator(entries=(v * kept) @ v.conj().T)


def min_eigenvalue(value: Any) -> float:
    matrix = _hermitian_entries(value)
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.eigvalsh(matrix)[0])


def is_psd(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None) -> bool:
    """Smallest eigenvalue >= -residual_tol * max(||A||, 1) (or * scale)."""
    reference = scale if scale is not None else max(operator_norm(value), 1.0)
    return min_eigenvalue(value) >= -tol.residual_tol * reference


def sqrt_psd(value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> HermitianOperator:
    """Positive square root; tiny negative eigenvalues are clamped to zero."""
    matrix = _hermitian_entries(value)
    if matrix.size == 0:
        return HermitianOperator(entries=matrix)
    w, v = scipy.linalg.eigh(matrix)
    size = float(np.max(np.abs(w)))
    if w[0] < -tol.residual_tol * size:
        raise NotPositiveError(f"eigenvalue {w[0]:.3e} below -{tol.residual_tol:.1e} * {size:.3e}")
    cutoff = tol.rank_cutoff(matrix.shape) * size
    roots = np.sqrt(np.where(w > cutoff, w, 0.0))
    return HermitianOperator(entries=(v * roots) @ v.conj().T)


def polar_selfadjoint(
    value: Any,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    zero_sign: Literal[1, -1] = 1,
) -> Tuple[HermitianOperator, HermitianOperator]:
    """T = U |T| with U = U^H = U^{-1} commuting with |T|.

    ``zero_sign`` is the sign assigned to the numerical nullspace of T.
    """
    matrix = _hermitian_entries(value)
    if matrix.size == 0:
        return HermitianOperator(entries=matrix), HermitianOperator(entries=matrix)
    w, v = scipy.linalg.eigh(matrix)
    cutoff = tol.rank_cutoff(matrix.shape) * float(np.max(np.abs(w)))
    null = np.abs(w) <= cutoff
    signs = np.where(null, float(zero_sign), np.sign(w))
    moduli = np.where(null, 0.0, np.abs(w))
    unitary = HermitianOperator(entries=(v * signs) @ v.conj().T)
    modulus = HermitianOperator(entries=(v * moduli) @ v.conj().T)
    return unitary, modulus


def hermitian_part(value: Any) -> HermitianOperator:
    """(X + X^H) / 2."""
    matrix = as_matrix(value)
    return HermitianOperator(entries=(matrix + matrix.conj().T) / 2.0)


def spectral_parts(value: Any) -> Tuple[HermitianOperator, HermitianOperator]:
    """A = A_plus - A_minus with A_plus, A_minus PSD and A_plus A_minus = 0."""
    matrix = _hermitian_entries(value)
    if matrix.size == 0:
        return HermitianOperator(entries=matrix), HermitianOperator(entries=matrix)
    w, v = scipy.linalg.eigh(matrix)
    positive = (v * np.clip(w, 0.0, None)) @ v.conj().T
    negative = (v * np.clip(-w, 0.0, None)) @ v.conj().T
    return HermitianOperator(entries=positive), HermitianOperator(entries=negative)
