"""Command line entry point: ``orcalc check | schur | order | lab``."""

import argparse
import json
import sys
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from orcalc.config import Settings, get_settings
from orcalc.domains.errors import DimensionMismatchError, InputError, OrcalcError
from orcalc.domains.lab.models import LabModel
from orcalc.domains.lab.services import run_lab
from orcalc.domains.numlin.models import HermitianOperator, Subspace, TolerancePolicy
from orcalc.domains.numlin.services import operator_norm, orthonormalize, relative_residual
from orcalc.domains.schur.models import OrderKind
from orcalc.domains.schur.orders import order_check, order_margin, order_witness
from orcalc.domains.schur.pstar import e0_projection, m_set_sample, max_check, schur_via_projection
from orcalc.domains.schur.services import (
    block_decompose,
    complementability_margins,
    compression,
    is_complementable,
    is_quasi_complementable,
    is_weakly_complementable,
    schur_complement,
)
from orcalc.infrastructure.monitoring.system import ResourceProbe
from orcalc.infrastructure.storage.matrix_file import MatrixFile, load_matrix

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FALSE = 2
EXIT_PRECONDITION = 3

PROPERTIES = ("complementable", "weak", "quasi")


class Report(BaseModel):
    """Structured result of one command; every verdict has a margin of the same name."""
    command: List[str]
    tolerance: TolerancePolicy
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    margins: Dict[str, float] = Field(default_factory=dict)
    values: Dict[str, MatrixFile] = Field(default_factory=dict)
    residuals: Dict[str, float] = Field(default_factory=dict)
    details: Dict[str, Any] = Field(default_factory=dict)
    wall_time: float = 0.0
    memory_mb: float = 0.0
    timestamp: str = ""


def _operator(path: str, tol: TolerancePolicy) -> HermitianOperator:
    return HermitianOperator.from_matrix(load_matrix(path), tol)


def _subspace(path: str, ambient_dim: int, tol: TolerancePolicy) -> Subspace:
    """Canonical orthonormal basis of the spanning set stored in ``path``."""
    span = load_matrix(path)
    if span.shape[0] != ambient_dim:
        raise DimensionMismatchError(f"subspace lives in C^{span.shape[0]}, matrix acts on C^{ambient_dim}")
    return orthonormalize(span, tol)


def cmd_check(args: argparse.Namespace, tol: TolerancePolicy, settings: Settings) -> Report:
    b = _operator(args.matrix, tol)
    s = _subspace(args.subspace, b.dim, tol)
    margins = complementability_margins(b, s, tol).model_dump()
    checks: Dict[str, Callable[[], bool]] = {
        "complementable": lambda: is_complementable(b, s, tol),
        "weak": lambda: is_weakly_complementable(b, s, tol)[0],
        "quasi": lambda: is_quasi_complementable(b, s, tol),
    }
    selected = PROPERTIES if args.property == "all" else (args.property,)
    report = Report(command=[], tolerance=tol)
    for name in selected:
        report.verdicts[name] = checks[name]()
        report.margins[name] = margins[name]
    blocks = block_decompose(b, s, tol)
    report.residuals["block_reassembly"] = relative_residual(blocks.reassemble(), b.entries)
    return report


def cmd_schur(args: argparse.Namespace, tol: TolerancePolicy, settings: Settings) -> Report:
    b = _operator(args.matrix, tol)
    s = _subspace(args.subspace, b.dim, tol)
    report = Report(command=[], tolerance=tol)
    formula = None
    if args.route in ("formula", "both"):
        formula = schur_complement(b, s, tol)
        report.values["schur_complement"] = MatrixFile.from_array(formula.entries)
        report.values["compression"] = MatrixFile.from_array(compression(b, s, tol).entries)
        sample = m_set_sample(b, s, settings.sample_count, seed=0, tol=tol)
        report.verdicts["max_prec"] = max_check(b, s, sample, formula.entries, tol)
        report.margins["max_prec"] = min(
            order_margin(OrderKind.PREC, member.entries, formula.entries, tol, operator_norm(b.entries))
            for member in sample
        )
        report.details["m_set_size"] = len(sample)
    if args.route in ("projection", "both"):
        e0 = e0_projection(b, s, tol)
        via = schur_via_projection(b, s, e0, tol, reference=formula)
        report.values["schur_via_projection"] = MatrixFile.from_array(via.entries)
        report.values["e0"] = MatrixFile.from_array(e0.matrix())
        if formula is not None:
            report.residuals["route_agreement"] = relative_residual(formula.entries, via.entries)
    return report


def cmd_order(args: argparse.Namespace, tol: TolerancePolicy, settings: Settings) -> Report:
    a, b = load_matrix(args.a), load_matrix(args.b)
    kind = OrderKind(args.kind)
    report = Report(command=[], tolerance=tol)
    verdict = order_check(kind, a, b, tol)
    report.verdicts[kind.value] = verdict
    report.margins[kind.value] = order_margin(kind, a, b, tol)
    if verdict:
        witness = order_witness(kind, a, b, tol)
        report.values["P"] = MatrixFile.from_array(witness.left.matrix())
        report.residuals["A = P B"] = relative_residual(witness.left.matrix() @ b, a)
        if witness.right is not None:
            report.values["Q"] = MatrixFile.from_array(witness.right.matrix())
            report.residuals["A^H = Q B^H"] = relative_residual(
                witness.right.matrix() @ np.conj(b).T, np.conj(a).T
            )
    return report


def cmd_lab(args: argparse.Namespace, tol: TolerancePolicy, settings: Settings) -> Report:
    decay = args.decay if args.decay is not None else settings.lab_decay
    coupling = args.coupling if args.coupling is not None else settings.lab_coupling
    lab = run_lab(args.model, args.n, decay, coupling, tol)
    report = Report(command=[], tolerance=tol)
    for row in lab.rows:
        report.verdicts[f"quasi[n={row.n}]"] = row.quasi
        report.margins[f"quasi[n={row.n}]"] = row.quasi_margin
        report.verdicts[f"weak[n={row.n}]"] = row.weak
        report.margins[f"weak[n={row.n}]"] = row.weak_margin
    report.details["lab"] = lab.model_dump(mode="json")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orcalc", description="Schur complements and oblique projections.")
    parser.add_argument("--log-level", dest="log_level", default=None, help="Level of the stderr log sink")
    parser.add_argument("--version", action="version", version=f"%(prog)s {Settings.model_fields['app_version'].default}")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--tol", type=float, default=None, help="Residual and symmetry tolerance")
        sub.add_argument("--strict", action="store_true", default=None, help="Exit with 2 on a false verdict")
        sub.add_argument("--out", default=None, help="Also write the JSON report to this path")

    check = commands.add_parser("check", help="Complementability predicates of (B, S)")
    check.add_argument("--property", choices=PROPERTIES + ("all",), default="all")
    check.add_argument("--matrix", required=True)
    check.add_argument("--subspace", required=True)
    common(check)
    check.set_defaults(handler=cmd_check)

    schur = commands.add_parser("schur", help="Schur complement B_{/S} and compression B_S")
    schur.add_argument("--matrix", required=True)
    schur.add_argument("--subspace", required=True)
    schur.add_argument("--route", choices=("formula", "projection", "both"), default="both")
    common(schur)
    schur.set_defaults(handler=cmd_schur)

    order = commands.add_parser("order", help="Minus, left-minus and ≺ orders")
    order.add_argument("--kind", choices=[kind.value for kind in OrderKind], required=True)
    order.add_argument("a")
    order.add_argument("b")
    common(order)
    order.set_defaults(handler=cmd_order)

    lab = commands.add_parser("lab", help="Truncation lab of the limit examples")
    lab.add_argument("--model", choices=[model.value for model in LabModel], required=True)
    lab.add_argument("--n", type=int, required=True)
    lab.add_argument("--decay", type=float, default=None)
    lab.add_argument("--coupling", type=float, default=None)
    common(lab)
    lab.set_defaults(handler=cmd_lab)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)

    # CLI > environment > defaults
    updates: Dict[str, Any] = {}
    if args.tol is not None:
        updates["tol"] = args.tol
    if args.strict is not None:
        updates["strict"] = args.strict
    if args.log_level is not None:
        updates["log_level"] = args.log_level.upper()
    try:
        settings = get_settings()
        if updates:
            settings = Settings(**{**settings.model_dump(), **updates})
    except ValidationError as e:
        print(f"orcalc: invalid configuration: {e}", file=sys.stderr)
        return EXIT_INPUT

    logger.remove()
    logger.add(sys.stderr, level=settings.log_level)
    tol = TolerancePolicy.from_settings(settings)
    logger.info(f"orcalc {args.command}: tol={settings.tol:g}, strict={settings.strict}")

    try:
        with ResourceProbe() as probe:
            report = args.handler(args, tol, settings)
    except (InputError, ValidationError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    except OrcalcError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_PRECONDITION

    report = report.model_copy(
        update={
            "command": ["orcalc", *argv],
            "wall_time": probe.wall_time,
            "memory_mb": probe.memory_mb,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
    )
    data = report.model_dump(mode="json", exclude_none=True)
    print(json.dumps(data, indent=2))
    if args.out:
        try:
            with open(args.out, "w") as f:
                json.dump(data, f, indent=2)
        except OSError as e:
            logger.error(f"cannot write {args.out}: {e}")
            return EXIT_INPUT
        logger.info(f"Saved orcalc report to {args.out}")

    if settings.strict and not all(report.verdicts.values()):
        return EXIT_FALSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
