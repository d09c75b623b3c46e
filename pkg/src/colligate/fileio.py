"""On-disk documents: colligations, tables, kernels, witnesses, values.

Every document is JSON with a ``kind`` tag.  Complex numbers are stored
as two-element arrays [re, im].  Writing goes through a canonical
serializer that prints every float with 17 significant digits, enough
to reproduce the double exactly, and emits keys in a fixed order, so
loading and re-saving a canonical file is byte identical.

The exact field names live in FORMATS.md at the repository root.
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .errors import FormatError
from .realization import Colligation, Representation
from .testfn import HermitianKernel, PointSet, TestFunctionTable

__all__ = [
    "dumps_canonical",
    "encode_matrix",
    "decode_matrix",
    "load_colligation",
    "save_colligation",
    "load_table",
    "save_table",
    "load_kernel",
    "save_kernel",
    "load_witness",
    "save_witness",
    "load_values",
    "save_values",
    "digest_file",
]

WITNESS_NAMES = ("A", "L", "Y", "A1", "A2", "X1", "Y2")


def _fmt_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return f"{v:.17g}"
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _is_scalar(x) -> bool:
    return x is None or isinstance(
        x, (bool, int, float, str, np.integer, np.floating)
    )


def _is_flat(x) -> bool:
    return isinstance(x, (list, tuple)) and all(_is_scalar(e) for e in x)


def _enc(x, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _is_scalar(x):
        return _fmt_scalar(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {_enc(v, indent + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(x, (list, tuple)):
        if not len(x):
            return "[]"
        if _is_flat(x):
            return "[" + ", ".join(_fmt_scalar(e) for e in x) + "]"
        if all(_is_flat(e) for e in x):
            return "[" + ", ".join(_enc(e, indent) for e in x) + "]"
        rows = [f"{inner}{_enc(e, indent + 1)}" for e in x]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps_canonical(obj) -> str:
    """Serialize to canonical JSON: fixed key order, 17-digit floats."""
    return _enc(obj, 0) + "\n"


def encode_matrix(m) -> list:
    """Matrix to nested lists of [re, im] pairs."""
    a = np.asarray(m, dtype=np.complex128)
    return [
        [[float(z.real), float(z.imag)] for z in row] for row in a
    ]


def decode_matrix(obj, where: str) -> np.ndarray:
    """Nested lists of [re, im] pairs back to a complex matrix."""
    if not isinstance(obj, list) or not obj:
        raise FormatError(f"{where}: expected a non-empty list of rows")
    rows = []
    width = None
    for r, row in enumerate(obj):
        if not isinstance(row, list):
            raise FormatError(f"{where}: row {r} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"{where}: row {r} has length {len(row)}, expected {width}")
        entries = []
        for c, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in entry)
            ):
                raise FormatError(
                    f"{where}: entry ({r}, {c}) must be a [re, im] number pair"
                )
            entries.append(complex(entry[0], entry[1]))
        rows.append(entries)
    a = np.asarray(rows, dtype=np.complex128)
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise FormatError(f"{where}: contains non-finite entries")
    return a


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise FormatError(f"{where}: missing field '{key}'")
    return obj[key]


def _check_kind(obj, path: str, kind: str) -> dict:
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: document must be a JSON object")
    found = _require(obj, "kind", path)
    if found != kind:
        raise FormatError(f"{path}: kind is '{found}', expected '{kind}'")
    return obj


def _labels(obj, where: str) -> PointSet:
    if not isinstance(obj, list) or not all(isinstance(s, str) for s in obj):
        raise FormatError(f"{where}: labels must be a list of strings")
    return PointSet(tuple(obj))


def _table_from(obj, where: str) -> TestFunctionTable:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    points = _labels(_require(obj, "labels", where), f"{where}.labels")
    values = decode_matrix(_require(obj, "values", where), f"{where}.values")
    if values.shape[1] != points.n:
        raise FormatError(
            f"{where}: {values.shape[1]} value columns for {points.n} labels"
        )
    return TestFunctionTable(points, values)


def _table_doc(t: TestFunctionTable) -> dict:
    return {"labels": list(t.points.labels), "values": encode_matrix(t.values)}


def load_table(path: str) -> TestFunctionTable:
    obj = _check_kind(_read_json(path), path, "table")
    return _table_from(obj, path)


def save_table(t: TestFunctionTable, path: str) -> None:
    doc = {"kind": "table"}
    doc.update(_table_doc(t))
    _write(doc, path)


def load_colligation(path: str) -> Colligation:
    obj = _check_kind(_read_json(path), path, "colligation")
    value_dim = _require(obj, "value_dim", path)
    if not isinstance(value_dim, int) or value_dim < 1:
        raise FormatError(f"{path}: value_dim must be a positive integer")
    split = _require(obj, "split", path)
    if split is not None:
        if (
            not isinstance(split, list)
            or len(split) != 2
            or not all(isinstance(s, int) and s >= 1 for s in split)
        ):
            raise FormatError(f"{path}: split must be null or two positive integers")
        split = (split[0], split[1])
    table = _table_from(_require(obj, "table", path), f"{path}.table")
    raw_projections = _require(obj, "projections", path)
    if not isinstance(raw_projections, list) or len(raw_projections) != table.m:
        raise FormatError(
            f"{path}: need one projection per test function ({table.m})"
        )
    projections = tuple(
        decode_matrix(p, f"{path}.projections[{j}]")
        for j, p in enumerate(raw_projections)
    )
    rep = Representation(projections, split=split)
    blocks = {
        name: decode_matrix(_require(obj, name, path), f"{path}.{name}")
        for name in ("A", "B", "C", "D")
    }
    return Colligation(rep=rep, table=table, **blocks)


def save_colligation(col: Colligation, path: str) -> None:
    doc = {
        "kind": "colligation",
        "value_dim": col.value_dim,
        "split": list(col.rep.split) if col.rep.split else None,
        "table": _table_doc(col.table),
        "projections": [encode_matrix(p) for p in col.rep.projections],
        "A": encode_matrix(col.A),
        "B": encode_matrix(col.B),
        "C": encode_matrix(col.C),
        "D": encode_matrix(col.D),
    }
    _write(doc, path)


def load_kernel(path: str) -> HermitianKernel:
    obj = _check_kind(_read_json(path), path, "kernel")
    points = _labels(_require(obj, "labels", path), f"{path}.labels")
    block_dim = _require(obj, "block_dim", path)
    if not isinstance(block_dim, int) or block_dim < 1:
        raise FormatError(f"{path}: block_dim must be a positive integer")
    raw = _require(obj, "blocks", path)
    if not isinstance(raw, list) or len(raw) != points.n:
        raise FormatError(f"{path}: blocks must be an {points.n}-row grid")
    grid = np.zeros((points.n, points.n, block_dim, block_dim), dtype=np.complex128)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != points.n:
            raise FormatError(f"{path}.blocks[{i}]: expected {points.n} blocks")
        for j, cell in enumerate(row):
            block = decode_matrix(cell, f"{path}.blocks[{i}][{j}]")
            if block.shape != (block_dim, block_dim):
                raise FormatError(
                    f"{path}.blocks[{i}][{j}]: shape {block.shape}, "
                    f"expected {(block_dim, block_dim)}"
                )
            grid[i, j] = block
    return HermitianKernel(points, grid)


def save_kernel(k: HermitianKernel, path: str) -> None:
    doc = {
        "kind": "kernel",
        "labels": list(k.points.labels),
        "block_dim": k.block_dim,
        "blocks": [
            [encode_matrix(k.block(i, j)) for j in range(k.n)] for i in range(k.n)
        ],
    }
    _write(doc, path)


def load_witness(path: str) -> dict[str, np.ndarray]:
    obj = _check_kind(_read_json(path), path, "witness")
    out: dict[str, np.ndarray] = {}
    for key, value in obj.items():
        if key == "kind":
            continue
        if key not in WITNESS_NAMES:
            raise FormatError(
                f"{path}: unknown witness '{key}', expected one of {WITNESS_NAMES}"
            )
        out[key] = decode_matrix(value, f"{path}.{key}")
    if not out:
        raise FormatError(f"{path}: witness document holds no matrices")
    return out


def save_witness(witnesses: dict[str, np.ndarray], path: str) -> None:
    doc: dict = {"kind": "witness"}
    for name in WITNESS_NAMES:
        if name in witnesses:
            doc[name] = encode_matrix(witnesses[name])
    _write(doc, path)


def load_values(path: str) -> tuple[PointSet, np.ndarray]:
    """Per-point square function values: (points, stack of shape (n, d, d))."""
    obj = _check_kind(_read_json(path), path, "values")
    points = _labels(_require(obj, "labels", path), f"{path}.labels")
    raw = _require(obj, "values", path)
    if not isinstance(raw, list) or len(raw) != points.n:
        raise FormatError(f"{path}: need one value matrix per label")
    mats = [decode_matrix(v, f"{path}.values[{i}]") for i, v in enumerate(raw)]
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise FormatError(
                f"{path}.values[{i}]: shape {m.shape}, expected {(d, d)}"
            )
    return points, np.stack(mats)


def save_values(points: PointSet, stack, path: str) -> None:
    doc = {
        "kind": "values",
        "labels": list(points.labels),
        "values": [encode_matrix(m) for m in np.asarray(stack, dtype=np.complex128)],
    }
    _write(doc, path)


def _write(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(doc))


def digest_file(path: str) -> str:
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()
