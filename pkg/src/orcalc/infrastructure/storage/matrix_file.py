"""Explicit-shape JSON matrix files: {"rows": r, "cols": c, "real": [[...]], "imag": [[...]]}."""

import json
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from orcalc.domains.errors import ParseError


class MatrixFile(BaseModel):
    rows: int = Field(gt=0)
    cols: int = Field(gt=0)
    real: List[List[float]]
    imag: Optional[List[List[float]]] = None

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_shapes(self) -> "MatrixFile":
        for name, table in (("real", self.real), ("imag", self.imag)):
            if table is None:
                continue
            if len(table) != self.rows or any(len(row) != self.cols for row in table):
                raise ValueError(f"{name} part does not have shape {self.rows}x{self.cols}")
        return self

    @classmethod
    def from_array(cls, value: Any) -> "MatrixFile":
        matrix = np.array(value, dtype=complex)
        if matrix.ndim == 1:
            matrix = matrix.reshape(-1, 1)
        imag = matrix.imag.tolist() if np.any(matrix.imag != 0.0) else None
        return cls(rows=matrix.shape[0], cols=matrix.shape[1], real=matrix.real.tolist(), imag=imag)

    def to_array(self) -> np.ndarray:
        """Complex matrix; real when the file has no imaginary part."""
        real = np.array(self.real, dtype=float).reshape(self.rows, self.cols)
        if self.imag is None:
            return real
        return real + 1j * np.array(self.imag, dtype=float).reshape(self.rows, self.cols)


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    """Reads a matrix file; every failure becomes a ParseError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    try:
        return MatrixFile.model_validate_json(text).to_array()
    except ValidationError as e:
        raise ParseError(f"{path}: {e.error_count()} validation error(s): {e.errors()[0]['msg']}") from e


def dump_matrix(value: Any, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(MatrixFile.from_array(value).model_dump(exclude_none=True), f, indent=2)
