"""Domain models for operator-range algebra."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from orcalc.domains.numlin.models import freeze


class RangeNormContext(BaseModel):
    """R(T) with the range norm ||u||_T = ||T^+ u||, the pseudoinverse cached."""
    T: np.ndarray
    Tpinv: np.ndarray

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("T", "Tpinv", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        return freeze(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "RangeNormContext":
        if self.Tpinv.shape != self.T.shape[::-1]:
            raise ValueError(f"pseudoinverse shape {self.Tpinv.shape} does not match {self.T.shape}")
        return self

    @property
    def ambient_dim(self) -> int:
        return self.T.shape[0]
