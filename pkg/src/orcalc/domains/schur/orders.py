"""Minus, left-minus and ≺ orders on rectangular matrices.

At finite dimension the three orders coincide (rank additivity); each one is still
decided by its own range condition.
"""

from typing import Any, Optional, Tuple

import numpy as np
from loguru import logger

from orcalc.domains.errors import DimensionMismatchError, RangeMismatchError
from orcalc.domains.numlin.models import DEFAULT_TOLERANCE, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import (
    adjoint,
    as_matrix,
    check_residual,
    nullspace_of,
    operator_norm,
    range_of,
    relative_residual,
    same_subspace,
    subspace_sum,
)
from orcalc.domains.proj.models import Projection
from orcalc.domains.proj.services import make_projection
from orcalc.domains.ranges.services import range_intersection, subspace_margin
from orcalc.domains.schur.models import OrderKind, OrderWitness


def _operands(
    a: Any, b: Any, scale: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray, Optional[float]]:
    """Operands plus the rank reference: max(||A||, ||B||), raised to ``scale`` when given."""
    left, right = as_matrix(a), as_matrix(b)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"cannot order matrices of shapes {left.shape} and {right.shape}")
    reference = max(operator_norm(left), operator_norm(right), scale or 0.0)
    return left, right, reference if reference > 0.0 else None


def _ranges(a: np.ndarray, b: np.ndarray, scale: Optional[float], tol: TolerancePolicy) -> Tuple[Subspace, Subspace, Subspace]:
    """R(A), R(B - A), R(B) with ranks decided against a common scale."""
    return range_of(a, tol, scale), range_of(b - a, tol, scale), range_of(b, tol, scale)


def _left_minus(a: np.ndarray, b: np.ndarray, scale: Optional[float], tol: TolerancePolicy) -> bool:
    """R(B) = R(A) ∔ R(B - A)."""
    range_a, range_diff, range_b = _ranges(a, b, scale, tol)
    if not range_intersection(range_a, range_diff, tol).is_trivial:
        return False
    return same_subspace(subspace_sum(range_a, range_diff, tol=tol), range_b, tol)


def _trivial_intersection(a: np.ndarray, b: np.ndarray, scale: Optional[float], tol: TolerancePolicy) -> bool:
    """R(A) ∩ R(B - A) = {0}."""
    range_a, range_diff, _ = _ranges(a, b, scale, tol)
    return range_intersection(range_a, range_diff, tol).is_trivial


def order_check(
    kind: OrderKind,
    a: Any,
    b: Any,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    scale: Optional[float] = None,
) -> bool:
    """Whether A is below B in the given order; ``scale`` sets a floor for rank decisions."""
    left, right, scale = _operands(a, b, scale)
    kind = OrderKind(kind)
    if kind == OrderKind.LEFT_MINUS:
        verdict = _left_minus(left, right, scale, tol)
    elif kind == OrderKind.MINUS:
        verdict = _left_minus(left, right, scale, tol) and _left_minus(adjoint(left), adjoint(right), scale, tol)
    else:
        verdict = _trivial_intersection(left, right, scale, tol) and _trivial_intersection(
            adjoint(left), adjoint(right), scale, tol
        )
    if verdict and kind != OrderKind.PREC:
        order_witness(kind, left, right, tol, scale)
    return verdict


def _witness_projection(a: np.ndarray, b: np.ndarray, scale: Optional[float], tol: TolerancePolicy) -> Projection:
    """P_{R(A) // R(B - A) ⊕ N(B^H)}, with A = P B checked."""
    if not _left_minus(a, b, scale, tol):
        raise RangeMismatchError("R(B) differs from R(A) ∔ R(B - A)")
    range_a, range_diff, _ = _ranges(a, b, scale, tol)
    complement = subspace_sum(range_diff, nullspace_of(adjoint(b), tol, scale), tol=tol)
    projection = make_projection(range_a, complement, tol)
    check_residual("A = P B", relative_residual(projection.apply(b, tol), a), tol.residual_tol)
    return projection


def order_witness(
    kind: OrderKind,
    a: Any,
    b: Any,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    scale: Optional[float] = None,
) -> OrderWitness:
    """P with A = P B; for the two-sided orders also Q with A^H = Q B^H."""
    left, right, scale = _operands(a, b, scale)
    kind = OrderKind(kind)
    first = _witness_projection(left, right, scale, tol)
    second = None
    if kind != OrderKind.LEFT_MINUS:
        second = _witness_projection(adjoint(left), adjoint(right), scale, tol)
    logger.debug(f"{kind.value} witness: rank P = {first.range_sub.dim}")
    return OrderWitness(kind=kind, left=first, right=second)


def order_margin(
    kind: OrderKind,
    a: Any,
    b: Any,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
    scale: Optional[float] = None,
) -> float:
    """Sine of the smallest angle between R(A) and R(B - A), over the sides the order looks at."""
    left, right, scale = _operands(a, b, scale)
    sides = [(left, right)]
    if OrderKind(kind) != OrderKind.LEFT_MINUS:
        sides.append((adjoint(left), adjoint(right)))
    margins = []
    for first, second in sides:
        range_a, range_diff, _ = _ranges(first, second, scale, tol)
        margins.append(subspace_margin(range_a, range_diff))
    return min(margins)
