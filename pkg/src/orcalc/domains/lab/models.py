"""Domain models for the truncation lab."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class LabModel(str, Enum):
    """Finite truncations of the two infinite-dimensional examples."""
    EX1 = "ex1"  # quasi-complementable, weak complementability lost in the limit
    EX214 = "ex214"  # weakly complementable, quasi-complementability lost in the limit


class LabRow(BaseModel):
    """Measurements on the truncation of size n (ambient dimension 2n)."""
    n: int = Field(ge=1)
    dim: int = Field(ge=2)
    quasi: bool
    weak: bool
    quasi_margin: float = Field(ge=0.0)
    weak_margin: float = Field(ge=0.0)
    f_norm: Optional[float] = None
    y0_norm: Optional[float] = None

    model_config = ConfigDict(frozen=True)


class LabReport(BaseModel):
    model: LabModel
    decay: float
    coupling: float
    rows: List[LabRow]
    y0_increasing: bool
    quasi_margin_decreasing: bool
    min_quasi_margin: float

    model_config = ConfigDict(frozen=True)
