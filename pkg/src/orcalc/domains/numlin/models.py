"""Domain models for the dense linear algebra substrate."""

from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from orcalc.domains.errors import NotHermitianError, NotInDomainError

# Unit roundoff of IEEE double precision.
UNIT_ROUNDOFF = float(np.finfo(np.float64).eps) / 2.0


def freeze(value: Any) -> np.ndarray:
    """Copies ``value`` into a read-only complex 2D array."""
    array = np.array(value, dtype=complex)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise ValueError(f"expected a matrix, got an array of dimension {array.ndim}")
    array.setflags(write=False)
    return array


class TolerancePolicy(BaseModel):
    """Thresholds governing every rank and equality decision of the library."""
    rank_tol_rel: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    sym_tol: float = Field(default=1e-9, gt=0.0, lt=1.0)
    residual_tol: float = Field(default=1e-9, gt=0.0, lt=1.0)

    model_config = ConfigDict(frozen=True)

    def rank_cutoff(self, shape: Sequence[int]) -> float:
        """Relative singular-value cutoff for a matrix of the given shape."""
        if self.rank_tol_rel is not None:
            return self.rank_tol_rel
        return 64.0 * UNIT_ROUNDOFF * max(max(shape, default=1), 1)

    @classmethod
    def from_settings(cls, settings: Any) -> "TolerancePolicy":
        return cls(rank_tol_rel=settings.rank_tol, sym_tol=settings.tol, residual_tol=settings.tol)


DEFAULT_TOLERANCE = TolerancePolicy()


def context_tolerance(info: ValidationInfo) -> TolerancePolicy:
    """Policy passed as ``context={"tol": ...}`` to model_validate, the default otherwise."""
    return (info.context or {}).get("tol", DEFAULT_TOLERANCE)


class HermitianOperator(BaseModel):
    """Dense selfadjoint matrix; the stored entries are exactly Hermitian."""
    entries: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("entries", mode="before")
    @classmethod
    def _symmetrize(cls, value: Any, info: ValidationInfo) -> np.ndarray:
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
        deviation = np.linalg.norm(matrix - matrix.conj().T)
        if deviation > context_tolerance(info).sym_tol * np.linalg.norm(matrix):
            raise ValueError(f"matrix is not Hermitian (deviation {deviation:.3e})")
        return freeze((matrix + matrix.conj().T) / 2.0)

    @classmethod
    def from_matrix(cls, value: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> "HermitianOperator":
        """Symmetrizes ``value`` after checking it against ``tol.sym_tol``."""
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise NotHermitianError(f"expected a square matrix, got shape {matrix.shape}")
        deviation = np.linalg.norm(matrix - matrix.conj().T)
        if deviation > tol.sym_tol * np.linalg.norm(matrix):
            raise NotHermitianError(f"matrix is not Hermitian (deviation {deviation:.3e})")
        return cls.model_validate({"entries": (matrix + matrix.conj().T) / 2.0}, context={"tol": tol})

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype: Any = None, copy: Any = None) -> np.ndarray:
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


class Subspace(BaseModel):
    """Linear subspace of C^n stored through an orthonormal basis (n x k, k may be 0)."""
    ambient_dim: int = Field(ge=0)
    basis: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("basis", mode="before")
    @classmethod
    def _freeze_basis(cls, value: Any) -> np.ndarray:
        return freeze(value)

    @model_validator(mode="after")
    def _check_orthonormal(self, info: ValidationInfo) -> "Subspace":
        if self.basis.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis has {self.basis.shape[0]} rows, ambient dimension is {self.ambient_dim}"
            )
        gram = self.basis.conj().T @ self.basis
        if np.linalg.norm(gram - np.eye(self.dim)) > context_tolerance(info).residual_tol * max(self.dim, 1):
            raise ValueError("basis columns are not orthonormal")
        return self

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_trivial(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def projector_matrix(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


class PartialOperator(BaseModel):
    """Linear operator defined on a subspace, stored as the images of the domain basis."""
    domain: Subspace
    action: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("action", mode="before")
    @classmethod
    def _freeze_action(cls, value: Any) -> np.ndarray:
        return freeze(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "PartialOperator":
        if self.action.shape[1] != self.domain.dim:
            raise ValueError(
                f"action has {self.action.shape[1]} columns, domain dimension is {self.domain.dim}"
            )
        return self

    @property
    def ambient_dim(self) -> int:
        return self.domain.ambient_dim

    @property
    def codomain_dim(self) -> int:
        return self.action.shape[0]

    def domain_residual(self, vectors: Any, scale: Optional[float] = None) -> float:
        """Largest distance of the given columns to the domain, relative to the batch.

        Columns are measured against the longest column of the batch, or against
        ``scale`` when that is larger.
        """
        columns = np.array(vectors, dtype=complex).reshape(self.ambient_dim, -1)
        outside = columns - self.domain.basis @ (self.domain.basis.conj().T @ columns)
        sizes = np.linalg.norm(columns, axis=0)
        reference = max(float(np.max(sizes, initial=0.0)), scale or 0.0)
        if reference == 0.0:
            return 0.0
        return float(np.max(np.linalg.norm(outside, axis=0), initial=0.0)) / reference

    def apply(
        self, vectors: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None
    ) -> np.ndarray:
        """Evaluates the operator on a vector or on the columns of a matrix."""
        raw = np.array(vectors, dtype=complex)
        residual = self.domain_residual(raw, scale)
        if residual > tol.residual_tol:
            raise NotInDomainError(f"vector lies outside the domain (relative residual {residual:.3e})")
        columns = raw.reshape(self.ambient_dim, -1)
        image = self.action @ (self.domain.basis.conj().T @ columns)
        return image.reshape(-1) if raw.ndim == 1 else image

    def extended(self) -> np.ndarray:
        """Matrix acting as the operator on the domain and as zero on its complement."""
        return self.action @ self.domain.basis.conj().T
