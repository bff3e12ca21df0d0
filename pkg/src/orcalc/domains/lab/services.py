"""Truncation lab: size sequences of the two limit examples and the trends of their margins."""

from typing import List, Tuple, Union

import numpy as np
from loguru import logger

from orcalc.domains.errors import BadModelError, NotWeaklyComplementableError
from orcalc.domains.lab.models import LabModel, LabReport, LabRow
from orcalc.domains.numlin.models import DEFAULT_TOLERANCE, HermitianOperator, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import make_subspace, operator_norm, orthogonal_complement, pinv
from orcalc.domains.schur.services import (
    complementability_margins,
    image_of_s,
    is_quasi_complementable,
    weak_witness,
)

MIN_SIZE = 4


def lab_sizes(n: int) -> List[int]:
    """4, 8, 16, ... up to n, with n appended when it is not reached exactly."""
    if n < MIN_SIZE:
        raise BadModelError(f"lab size must be at least {MIN_SIZE}, got {n}")
    sizes = []
    size = MIN_SIZE
    while size <= n:
        sizes.append(size)
        size *= 2
    if sizes[-1] != n:
        sizes.append(n)
    return sizes


def _decaying(n: int, decay: float) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) ** -decay


def build_model(
    model: Union[LabModel, str], n: int, decay: float = 1.0, coupling: float = 1.0
) -> Tuple[HermitianOperator, Subspace, np.ndarray]:
    """(B, S, probe) for the truncation of size n; the probe is a unit vector of S^perp."""
    try:
        model = LabModel(model)
    except ValueError as exc:
        raise BadModelError(f"unknown lab model {model!r}") from exc
    if n < 1:
        raise BadModelError(f"lab size must be positive, got {n}")
    dim = 2 * n
    diagonal = _decaying(n, decay)

    if model == LabModel.EX1:
        matrix = np.zeros((dim, dim))
        matrix[:n, :n] = np.diag(diagonal)
        matrix[:n, n:] = coupling * np.eye(n)
        matrix[n:, :n] = coupling * np.eye(n)
        s = make_subspace(np.eye(dim)[:, :n], dim)
        probe = np.concatenate([np.zeros(n), diagonal])
        return HermitianOperator(entries=matrix), s, probe / np.linalg.norm(probe)

    full = _decaying(dim, decay)
    x = full / np.linalg.norm(full)
    s = orthogonal_complement(make_subspace(x.reshape(-1, 1), dim))
    return HermitianOperator(entries=np.diag(full)), s, x


def _probe_margin(b: HermitianOperator, s: Subspace, probe: np.ndarray, tol: TolerancePolicy) -> float:
    """Sine of the angle between the probe and B S."""
    image = image_of_s(b, s, tol)
    outside = probe - image.basis @ (image.basis.conj().T @ probe)
    return float(np.linalg.norm(outside))


def measure(
    model: Union[LabModel, str], n: int, decay: float = 1.0, coupling: float = 1.0,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> LabRow:
    b, s, probe = build_model(model, n, decay, coupling)
    margins = complementability_margins(b, s, tol)
    f_norm = y0_norm = None
    weak = True
    try:
        witness = weak_witness(b, s, tol)
        y0 = witness.f.conj().T @ witness.u.entries @ pinv(witness.absa_half.entries, tol)
        f_norm, y0_norm = operator_norm(witness.f), operator_norm(y0)
    except NotWeaklyComplementableError:
        weak = False
    return LabRow(
        n=n,
        dim=b.dim,
        quasi=is_quasi_complementable(b, s, tol),
        weak=weak,
        quasi_margin=_probe_margin(b, s, probe, tol),
        weak_margin=margins.weak,
        f_norm=f_norm,
        y0_norm=y0_norm,
    )


def _strictly(values: List[float], increasing: bool) -> bool:
    pairs = list(zip(values, values[1:]))
    return all((later > earlier) if increasing else (later < earlier) for earlier, later in pairs)


def run_lab(
    model: Union[LabModel, str], n: int, decay: float = 1.0, coupling: float = 1.0,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> LabReport:
    """Measures every size of :func:`lab_sizes` and summarises the trends."""
    try:
        model = LabModel(model)
    except ValueError as exc:
        raise BadModelError(f"unknown lab model {model!r}") from exc
    rows = []
    for size in lab_sizes(n):
        logger.info(f"lab {model.value}: n = {size}")
        rows.append(measure(model, size, decay, coupling, tol))
    y0_norms = [row.y0_norm for row in rows]
    margins = [row.quasi_margin for row in rows]
    return LabReport(
        model=model,
        decay=decay,
        coupling=coupling,
        rows=rows,
        y0_increasing=None not in y0_norms and _strictly(y0_norms, increasing=True),
        quasi_margin_decreasing=_strictly(margins, increasing=False),
        min_quasi_margin=min(margins),
    )
