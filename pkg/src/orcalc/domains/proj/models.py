"""Domain models for projections with prescribed range and nullspace."""

from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from orcalc.domains.numlin.models import (
    DEFAULT_TOLERANCE,
    HermitianOperator,
    PartialOperator,
    Subspace,
    TolerancePolicy,
)


class Projection(BaseModel):
    """E = P_{M // N}, defined on the (possibly proper) domain M ∔ N."""
    base: PartialOperator
    range_sub: Subspace
    null_sub: Subspace

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "Projection":
        if self.range_sub.dim + self.null_sub.dim != self.base.domain.dim:
            raise ValueError(
                f"dim M + dim N = {self.range_sub.dim + self.null_sub.dim} "
                f"differs from the domain dimension {self.base.domain.dim}"
            )
        return self

    @property
    def domain(self) -> Subspace:
        return self.base.domain

    @property
    def ambient_dim(self) -> int:
        return self.base.ambient_dim

    @property
    def is_full(self) -> bool:
        return self.domain.is_full

    def matrix(self) -> np.ndarray:
        """E on its domain, zero on the orthogonal complement of the domain."""
        return self.base.extended()

    def apply(
        self, vectors: Any, tol: TolerancePolicy = DEFAULT_TOLERANCE, scale: Optional[float] = None
    ) -> np.ndarray:
        return self.base.apply(vectors, tol, scale)


class GammaRep(BaseModel):
    """Γ = (A1² + A2²)^{1/2} together with the orthogonal projection P_Γ = Γ⁻¹ E Γ."""
    A1: HermitianOperator
    A2: HermitianOperator
    Gamma: HermitianOperator
    Pgamma: HermitianOperator
    projection: Projection

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
