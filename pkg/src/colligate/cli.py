"""Command line front end.

Every subcommand reads JSON documents, prints a single JSON report to
stdout, and exits with 0 (checks passed), 1 (a verdict or residual
failed), or 2 (malformed input or violated precondition).  Reports go
through the canonical serializer, so numbers carry 17 significant
digits and parsing the report recovers them exactly.
"""

from __future__ import annotations

import argparse
import sys

from . import factorization as fz
from .errors import (
    ColligateError,
    OrthogonalityError,
    PaddingError,
    RankError,
    StructureError,
    WitnessError,
)
from .fileio import (
    digest_file,
    dumps_canonical,
    encode_matrix,
    load_colligation,
    load_kernel,
    load_table,
    load_values,
    load_witness,
    save_colligation,
)
from .linalg import DEFAULT_ATOL, max_abs
from .realization import (
    Colligation,
    coordinate_representation,
    direct_sum,
    evaluate,
    product,
    random_colligation,
)
from .testfn import agler_norm_lower_bound, is_admissible, validate_test_family

__all__ = ["main"]


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="colligate",
        description="Evaluate, factor, and certify isometric colligations "
        "over finite test-function families.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument(
            "--atol",
            type=float,
            default=DEFAULT_ATOL,
            help="tolerance for validation and verdicts",
        )
        return p

    p = add("eval", "evaluate the transfer function at table points")
    p.add_argument("colligation")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--point", type=int, default=None, help="single point index")
    g.add_argument("--all", action="store_true", help="every table point (the default)")

    p = add("check", "test factorizability conditions for one variant")
    p.add_argument("colligation")
    p.add_argument("--variant", choices=fz.VARIANTS, required=True)
    p.add_argument("--witness", default=None, help="witness document")
    p.add_argument(
        "--auto",
        action="store_true",
        help="search for missing witnesses instead of reading them",
    )

    p = add("factor", "split a colligation into two isometric factors")
    p.add_argument("colligation")
    p.add_argument("--variant", choices=fz.VARIANTS, required=True)
    p.add_argument("--witness", default=None)
    p.add_argument("--auto", action="store_true")
    p.add_argument("-o", "--output", required=True, help="stem for <stem>.f1.json and <stem>.f2.json")

    p = add("multiply", "compose two colligations over the same table")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output", required=True)

    p = add("verify", "check that two factors multiply back to a parent")
    p.add_argument("parent")
    p.add_argument("first")
    p.add_argument("second")

    p = add("random", "draw a random isometric colligation with a split state space")
    p.add_argument("--table", required=True)
    p.add_argument("--value-dim", type=int, required=True)
    p.add_argument("--state-dims", required=True, help="two sizes, e.g. 3,2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = add("admissible", "test positivity of a kernel against a table")
    p.add_argument("kernel")
    p.add_argument("table")

    p = add("norm-bound", "lower bound the smallest bound certified by kernels")
    p.add_argument("values")
    p.add_argument("--kernels", required=True, help="comma-separated kernel files")

    return top


def _loaded_colligation(path: str, atol: float) -> Colligation:
    col = load_colligation(path)
    diag = validate_test_family(col.table, atol=atol)
    if not diag.passed:
        raise StructureError(f"{path}: test-function table fails validation: {diag}")
    col.validate(atol)
    return col


def _residuals(res: dict) -> dict:
    return {k: float(v) for k, v in res.items()}


def _encode_witnesses(witnesses: dict) -> dict:
    return {k: encode_matrix(v) for k, v in witnesses.items()}


def _resolve_witnesses(split, variant, witness_path, auto, atol):
    """Return (witness dict, source tag).  Raises on unusable input."""
    given = load_witness(witness_path) if witness_path else {}
    if variant == "vanishing-selfadjoint":
        if "A" not in given:
            raise StructureError(
                "vanishing-selfadjoint variant needs a witness document with 'A'"
            )
        return {"A": given["A"]}, "file"
    if variant == "both-vanishing":
        if "L" in given and "Y" in given:
            return {"L": given["L"], "Y": given["Y"]}, "file"
        if not auto:
            raise StructureError(
                "both-vanishing variant needs 'L' and 'Y', or --auto"
            )
        return _search_LY(split, atol), "auto"
    if "A1" not in given or "A2" not in given:
        raise StructureError("general variant needs a witness document with 'A1' and 'A2'")
    if "X1" in given and "Y2" in given:
        return dict(given), "file"
    if not auto:
        raise StructureError(
            "general variant needs 'X1' and 'Y2' in the witness, or --auto"
        )
    x1, y2 = fz.solve_general_witnesses(split, given["A1"], given["A2"], atol=atol)
    return {"A1": given["A1"], "A2": given["A2"], "X1": x1, "Y2": y2}, "auto"


def _search_LY(split, atol):
    """Witness search for the both-vanishing variant.

    Any failure here certifies that no witness pair of the required
    form exists at this tolerance, so callers turn it into a false
    verdict rather than an input error.
    """
    pattern = {
        "parent_base_vanishes": max_abs(split.A),
        "c1_vanishes": max_abs(split.C1),
        "b2_vanishes": max_abs(split.B2),
    }
    worst = max(pattern.values())
    if worst > atol:
        cert = fz.FactorizationCertificate(
            variant="both-vanishing",
            witnesses={},
            residuals=pattern,
            atol=atol,
            verdict=False,
        )
        raise WitnessError(
            f"required vanishing pattern fails, largest entry {worst:.3e}",
            certificate=cert,
        )
    try:
        left, y = fz.find_LY_witness(split, atol=atol)
    except (RankError, OrthogonalityError, PaddingError) as exc:
        raise WitnessError(f"no witness pair exists: {exc}") from exc
    return {"L": left, "Y": y}


def _certificate(split, variant, witnesses, atol):
    if variant == "vanishing-selfadjoint":
        return fz.check_vanishing_selfadjoint(split, witnesses["A"], atol=atol)
    if variant == "both-vanishing":
        return fz.check_both_vanishing(split, witnesses["L"], witnesses["Y"], atol=atol)
    return fz.check_general(
        split,
        witnesses["A1"],
        witnesses["A2"],
        witnesses["X1"],
        witnesses["Y2"],
        atol=atol,
    )


def _cmd_eval(args, report):
    col = _loaded_colligation(args.colligation, args.atol)
    indices = range(col.table.n) if args.point is None else [args.point]
    evaluations = []
    for i in indices:
        if not 0 <= i < col.table.n:
            raise StructureError(f"point index {i} outside 0..{col.table.n - 1}")
        evaluations.append(
            {
                "index": i,
                "label": col.table.points.labels[i],
                "value": encode_matrix(evaluate(col, i)),
            }
        )
    report["value_dim"] = col.value_dim
    report["evaluations"] = evaluations
    return 0


def _cmd_check(args, report):
    col = _loaded_colligation(args.colligation, args.atol)
    split = fz.split_blocks(col, atol=args.atol)
    report["variant"] = args.variant
    try:
        witnesses, source = _resolve_witnesses(
            split, args.variant, args.witness, args.auto, args.atol
        )
    except WitnessError as exc:
        report["witness_source"] = "auto"
        report["verdict"] = False
        report["witness_error"] = str(exc)
        if exc.certificate is not None:
            report["residuals"] = _residuals(exc.certificate.residuals)
        return 1
    cert = _certificate(split, args.variant, witnesses, args.atol)
    report["witness_source"] = source
    report["witnesses"] = _encode_witnesses(witnesses)
    report["residuals"] = _residuals(cert.residuals)
    report["verdict"] = cert.verdict
    return 0 if cert.verdict else 1


def _cmd_factor(args, report):
    col = _loaded_colligation(args.colligation, args.atol)
    split = fz.split_blocks(col, atol=args.atol)
    report["variant"] = args.variant
    try:
        witnesses, source = _resolve_witnesses(
            split, args.variant, args.witness, args.auto, args.atol
        )
        if args.variant == "vanishing-selfadjoint":
            first, second = fz.extract_vanishing_selfadjoint(
                split, witnesses["A"], atol=args.atol
            )
        elif args.variant == "both-vanishing":
            first, second = fz.extract_both_vanishing(
                split, witnesses["L"], witnesses["Y"], atol=args.atol
            )
        else:
            first, second = fz.extract_general(
                split,
                witnesses["A1"],
                witnesses["A2"],
                witnesses["X1"],
                witnesses["Y2"],
                atol=args.atol,
            )
    except WitnessError as exc:
        report["verdict"] = False
        report["witness_error"] = str(exc)
        if exc.certificate is not None:
            report["residuals"] = _residuals(exc.certificate.residuals)
        return 1
    paths = {"first": f"{args.output}.f1.json", "second": f"{args.output}.f2.json"}
    save_colligation(first, paths["first"])
    save_colligation(second, paths["second"])
    report["witness_source"] = source
    report["witnesses"] = _encode_witnesses(witnesses)
    report["product_residual"] = fz.verify_factorization(col, first, second)
    report["outputs"] = paths
    report["verdict"] = True
    return 0


def _cmd_multiply(args, report):
    first = _loaded_colligation(args.first, args.atol)
    second = _loaded_colligation(args.second, args.atol)
    combined = product(first, second)
    save_colligation(combined, args.output)
    report["state_dim"] = combined.state_dim
    report["split"] = list(combined.rep.split)
    report["output"] = args.output
    return 0


def _cmd_verify(args, report):
    parent = _loaded_colligation(args.parent, args.atol)
    first = _loaded_colligation(args.first, args.atol)
    second = _loaded_colligation(args.second, args.atol)
    residual = fz.verify_factorization(parent, first, second)
    report["residual"] = residual
    report["verdict"] = residual <= args.atol
    return 0 if residual <= args.atol else 1


def _round_robin(m: int, size: int) -> list[int]:
    return [size // m + (1 if j < size % m else 0) for j in range(m)]


def _cmd_random(args, report):
    table = load_table(args.table)
    diag = validate_test_family(table, atol=args.atol)
    if not diag.passed:
        raise StructureError(f"{args.table}: test-function table fails validation: {diag}")
    parts = args.state_dims.split(",")
    if len(parts) != 2:
        raise StructureError("--state-dims takes exactly two sizes, e.g. 3,2")
    try:
        n1, n2 = (int(p) for p in parts)
    except ValueError as exc:
        raise StructureError(f"--state-dims: {exc}") from exc
    if n1 < 1 or n2 < 1 or args.value_dim < 1:
        raise StructureError("state and value dimensions must be positive")
    rep = direct_sum(
        coordinate_representation(_round_robin(table.m, n1)),
        coordinate_representation(_round_robin(table.m, n2)),
    )
    col = random_colligation(args.value_dim, rep, table, seed=args.seed)
    save_colligation(col, args.output)
    report["value_dim"] = col.value_dim
    report["state_dim"] = col.state_dim
    report["split"] = list(col.rep.split)
    report["seed"] = args.seed
    report["isometry_defect"] = col.isometry_defect()
    report["output"] = args.output
    return 0


def _cmd_admissible(args, report):
    kernel = load_kernel(args.kernel)
    table = load_table(args.table)
    diag = validate_test_family(table, atol=args.atol)
    if not diag.passed:
        raise StructureError(f"{args.table}: test-function table fails validation: {diag}")
    verdict = is_admissible(kernel, table, atol=args.atol)
    report["block_dim"] = kernel.block_dim
    report["verdict"] = verdict
    return 0 if verdict else 1


def _cmd_norm_bound(args, report):
    points, stack = load_values(args.values)
    kernels = [load_kernel(p) for p in args.kernels.split(",")]
    for path, kernel in zip(args.kernels.split(","), kernels):
        if kernel.points.labels != points.labels:
            raise StructureError(f"{path}: kernel labels do not match the values file")
    bound = agler_norm_lower_bound(stack, kernels, atol=args.atol)
    report["kernel_count"] = len(kernels)
    report["bound"] = bound
    return 0


_HANDLERS = {
    "eval": _cmd_eval,
    "check": _cmd_check,
    "factor": _cmd_factor,
    "multiply": _cmd_multiply,
    "verify": _cmd_verify,
    "random": _cmd_random,
    "admissible": _cmd_admissible,
    "norm-bound": _cmd_norm_bound,
}

_INPUT_ARGS = (
    "colligation",
    "first",
    "second",
    "parent",
    "kernel",
    "table",
    "values",
    "witness",
)


def _input_digests(args) -> dict:
    digests = {}
    for name in _INPUT_ARGS:
        path = getattr(args, name, None)
        if path:
            digests[path] = digest_file(path)
    if getattr(args, "kernels", None):
        for path in args.kernels.split(","):
            digests[path] = digest_file(path)
    return digests


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    report = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "atol": args.atol,
    }
    try:
        report["inputs"] = _input_digests(args)
        code = _HANDLERS[args.command](args, report)
    except (ColligateError, OSError) as exc:
        report["error"] = type(exc).__name__
        report["detail"] = str(exc)
        sys.stdout.write(dumps_canonical(report))
        return 2
    sys.stdout.write(dumps_canonical(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
