"""Domain models for B-symmetric projections."""

from pydantic import BaseModel, ConfigDict

from orcalc.domains.numlin.models import HermitianOperator, Subspace


class GrammianSplit(BaseModel):
    """G_{B,S} = G1 - G2 on S coordinates, S = S+ ⊕ S-."""
    G1: HermitianOperator
    G2: HermitianOperator
    Splus: Subspace
    Sminus: Subspace

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
