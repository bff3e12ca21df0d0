"""Domain models for Schur complements, the P*(B, S) family and matrix orders."""

from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from orcalc.domains.numlin.models import HermitianOperator, Subspace, freeze
from orcalc.domains.proj.models import Projection


class BlockDecomposition(BaseModel):
    """B = [[a, b], [b^H, c]] with respect to H = S ⊕ S^perp, in the canonical bases."""
    S: Subspace
    Sperp: Subspace
    a: HermitianOperator
    b: np.ndarray
    c: HermitianOperator
    scale: float = Field(ge=0.0, description="||B||, the reference for rank decisions on the blocks")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("b", mode="before")
    @classmethod
    def _freeze_b(cls, value: Any) -> np.ndarray:
        return freeze(value)

    def basis(self) -> np.ndarray:
        """W = [S | S^perp], unitary."""
        return np.hstack([self.S.basis, self.Sperp.basis])

    def lift(self, top_left: Any, top_right: Any, bottom_right: Any) -> np.ndarray:
        """W [[x, y], [y^H, z]] W^H."""
        block = np.block(
            [
                [np.asarray(top_left, dtype=complex), np.asarray(top_right, dtype=complex)],
                [np.asarray(top_right, dtype=complex).conj().T, np.asarray(bottom_right, dtype=complex)],
            ]
        )
        w = self.basis()
        return w @ block @ w.conj().T

    def reassemble(self) -> np.ndarray:
        return self.lift(self.a.entries, self.b, self.c.entries)


class WeakWitness(BaseModel):
    """a = u |a|, and f is the reduced solution of b = |a|^{1/2} x."""
    u: HermitianOperator
    absa_half: HermitianOperator
    f: np.ndarray
    blocks: BlockDecomposition

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("f", mode="before")
    @classmethod
    def _freeze_f(cls, value: Any) -> np.ndarray:
        return freeze(value)


class ComplementabilityMargins(BaseModel):
    """Numerical margins of the three complementability predicates.

    ``complementable`` and ``weak`` are the relative parts of b outside R(a) and
    R(|a|^{1/2}); ``quasi`` is the sine of the smallest angle between BS and S^perp.
    """
    complementable: float = Field(ge=0.0)
    weak: float = Field(ge=0.0)
    quasi: float = Field(ge=0.0)

    model_config = ConfigDict(frozen=True)


class WeakDecomposition(BaseModel):
    """B = B1 + B2 - B3 with B2, B3 PSD, S ⊆ N(B1), S- ⊆ N(B2), S+ ⊆ N(B3)."""
    b1: HermitianOperator
    b2: HermitianOperator
    b3: HermitianOperator

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class OrderKind(str, Enum):
    MINUS = "minus"
    LEFT_MINUS = "left-minus"
    PREC = "prec"


class OrderWitness(BaseModel):
    """Projections P with A = P B and, for the two-sided orders, Q with A^H = Q B^H."""
    kind: OrderKind
    left: Projection
    right: Optional[Projection] = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
