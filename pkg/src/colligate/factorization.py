"""Factorization of split colligations into two smaller colligations.

A colligation whose representation reduces along a recorded state split
and whose D block has the upper-triangular pattern

    U = [[A,  B1, B2],
         [C1, D1, D2],
         [C2, 0,  D3]]

is the candidate product of two factors.  Three checkable conditions
identify when such a product splits back, one per supported variant:

  vanishing-selfadjoint   first factor vanishes at the base point, the
                          second takes a selfadjoint invertible value A
  both-vanishing          both factors vanish at the base point; the
                          witness is an isometric factor D2 = L Y
  general                 no base-point constraint; the witness is a
                          four-tuple (A1, A2, X1, Y2) splitting A, B2,
                          C1, D2 simultaneously

Each checker returns a certificate with named residuals, and each
extractor rebuilds the two factors and verifies they are isometric
before returning them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, StructureError, WitnessError
from .linalg import (
    DEFAULT_ATOL,
    as_matrix,
    injective_on_range,
    is_isometry,
    isometric_factor,
    max_abs,
)
from .realization import Colligation, evaluate, rep_is_reducible

__all__ = [
    "SplitColligation",
    "FactorizationCertificate",
    "split_blocks",
    "check_vanishing_selfadjoint",
    "extract_vanishing_selfadjoint",
    "find_LY_witness",
    "check_both_vanishing",
    "extract_both_vanishing",
    "check_general",
    "solve_general_witnesses",
    "extract_general",
    "verify_factorization",
]

VARIANTS = ("vanishing-selfadjoint", "both-vanishing", "general")


@dataclass(frozen=True, eq=False)
class SplitColligation:
    """Block view of a colligation along its recorded state split.

    B and C split into (B1, B2) and (C1, C2); the D block splits into
    [[D1, D2], [D21, D3]] with D21 required to vanish.  The parent
    colligation is kept so extractors can reuse its table and the two
    corner restrictions of its representation.
    """

    parent: Colligation
    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray

    @property
    def value_dim(self) -> int:
        return self.A.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return self.parent.rep.split


def split_blocks(col: Colligation, atol: float = DEFAULT_ATOL) -> SplitColligation:
    """Carve the split block view out of a colligation.

    Fails when no split is recorded, when the representation does not
    reduce along it, or when the lower-left D block exceeds atol.
    """
    if col.rep.split is None:
        raise StructureError("colligation carries no state split")
    if not rep_is_reducible(col.rep, atol):
        raise StructureError(
            "representation does not reduce along the recorded split"
        )
    n1, _ = col.rep.split
    d21 = col.D[n1:, :n1]
    stray = max_abs(d21)
    if stray > atol:
        raise StructureError(
            f"lower-left D block must vanish, largest entry {stray:.3e}"
        )
    return SplitColligation(
        parent=col,
        A=col.A,
        B1=col.B[:, :n1].copy(),
        B2=col.B[:, n1:].copy(),
        C1=col.C[:n1, :].copy(),
        C2=col.C[n1:, :].copy(),
        D1=col.D[:n1, :n1].copy(),
        D2=col.D[:n1, n1:].copy(),
        D3=col.D[n1:, n1:].copy(),
    )


@dataclass(frozen=True, eq=False)
class FactorizationCertificate:
    """Outcome of one factorization check.

    residuals maps condition names to the measured defects; verdict is
    true when every condition holds within atol.  The witnesses that
    were checked ride along for reporting.
    """

    variant: str
    witnesses: dict[str, np.ndarray]
    residuals: dict[str, float]
    atol: float
    verdict: bool


def check_vanishing_selfadjoint(
    s: SplitColligation, a, atol: float = DEFAULT_ATOL
) -> FactorizationCertificate:
    """Certificate for the vanishing/selfadjoint factorization conditions.

    The witness ``a`` is the claimed base-point value of the second
    factor.  Conditions: the parent A and B2 blocks vanish, a is
    selfadjoint with smallest singular value above atol, C1* C1 equals
    a squared, and C1 a^-2 C1* D2 reproduces D2.
    """
    aw = as_matrix(a, "witness a")
    d = s.value_dim
    if aw.shape != (d, d):
        raise DimensionError(f"witness a is {aw.shape}, expected {(d, d)}")
    smin = float(np.linalg.svd(aw, compute_uv=False)[-1]) if d else 0.0
    invertible = smin > atol
    residuals = {
        "parent_base_vanishes": max_abs(s.A),
        "parent_b2_vanishes": max_abs(s.B2),
        "witness_selfadjoint": max_abs(aw - aw.conj().T),
        "witness_invertible": max(0.0, atol - smin),
        "gram_match": max_abs(s.C1.conj().T @ s.C1 - aw @ aw),
    }
    if invertible:
        # C1 a^-2 C1* D2 via two solves against a, never an inverse
        x = np.linalg.solve(aw, s.C1.conj().T @ s.D2)
        x = np.linalg.solve(aw, x)
        residuals["compression_match"] = max_abs(s.C1 @ x - s.D2)
    else:
        residuals["compression_match"] = float("inf")
    verdict = invertible and all(v <= atol for v in residuals.values())
    return FactorizationCertificate(
        variant="vanishing-selfadjoint",
        witnesses={"A": aw},
        residuals=residuals,
        atol=atol,
        verdict=verdict,
    )


def extract_vanishing_selfadjoint(
    s: SplitColligation, a, atol: float = DEFAULT_ATOL
) -> tuple[Colligation, Colligation]:
    """Rebuild the two factors certified by check_vanishing_selfadjoint.

    The first factor is [[0, B1], [C1 a^-1, D1]] and vanishes at the
    base point exactly; the second is [[a, a^-1 C1* D2], [C2, D3]] and
    takes the value ``a`` there.
    """
    cert = check_vanishing_selfadjoint(s, a, atol)
    if not cert.verdict:
        raise WitnessError(
            "conditions fail, nothing to extract", certificate=cert
        )
    aw = cert.witnesses["A"]
    d = s.value_dim
    c1a_inv = np.linalg.solve(aw.T, s.C1.T).T
    b2 = np.linalg.solve(aw, s.C1.conj().T @ s.D2)
    table = s.parent.table
    first = Colligation(
        rep=s.parent.rep.restrict(0),
        table=table,
        A=np.zeros((d, d), dtype=np.complex128),
        B=s.B1,
        C=c1a_inv,
        D=s.D1,
    )
    second = Colligation(
        rep=s.parent.rep.restrict(1),
        table=table,
        A=aw.copy(),
        B=b2,
        C=s.C2,
        D=s.D3,
    )
    _require_isometric(first, second, 10.0 * atol, cert)
    return first, second


def find_LY_witness(
    s: SplitColligation, atol: float = DEFAULT_ATOL
) -> tuple[np.ndarray, np.ndarray]:
    """Solve for the (L, Y) witness of the both-vanishing pattern.

    Requires the parent A, C1 and B2 blocks to vanish within atol, then
    factors D2 = L Y with L an isometry into the first state block that
    is orthogonal to range(D1).
    """
    for name, block in (
        ("parent A block", s.A),
        ("C1 block", s.C1),
        ("B2 block", s.B2),
    ):
        stray = max_abs(block)
        if stray > atol:
            raise StructureError(
                f"{name} must vanish for this pattern, largest entry {stray:.3e}"
            )
    return isometric_factor(s.D2, s.value_dim, orthogonal_to=s.D1, atol=atol)


def check_both_vanishing(
    s: SplitColligation, left, y, atol: float = DEFAULT_ATOL
) -> FactorizationCertificate:
    """Certificate for the both-vanishing factorization conditions.

    Conditions: the parent A, C1 and B2 blocks vanish, L is an isometry
    with range orthogonal to range(D1), and D2 factors as L Y.
    """
    n1, n2 = s.dims
    d = s.value_dim
    lw = as_matrix(left, "witness L")
    yw = as_matrix(y, "witness Y")
    if lw.shape != (n1, d):
        raise DimensionError(f"witness L is {lw.shape}, expected {(n1, d)}")
    if yw.shape != (d, n2):
        raise DimensionError(f"witness Y is {yw.shape}, expected {(d, n2)}")
    residuals = {
        "parent_base_vanishes": max_abs(s.A),
        "c1_vanishes": max_abs(s.C1),
        "b2_vanishes": max_abs(s.B2),
        "l_isometry": max_abs(lw.conj().T @ lw - np.eye(d)),
        "l_range_orthogonal": max_abs(lw.conj().T @ s.D1),
        "d2_factors": max_abs(s.D2 - lw @ yw),
    }
    verdict = all(v <= atol for v in residuals.values())
    return FactorizationCertificate(
        variant="both-vanishing",
        witnesses={"L": lw, "Y": yw},
        residuals=residuals,
        atol=atol,
        verdict=verdict,
    )


def extract_both_vanishing(
    s: SplitColligation, left, y, atol: float = DEFAULT_ATOL
) -> tuple[Colligation, Colligation]:
    """Rebuild the two factors certified by check_both_vanishing.

    The factors are [[0, B1], [L, D1]] and [[0, Y], [C2, D3]]; both
    vanish at the base point exactly.
    """
    cert = check_both_vanishing(s, left, y, atol)
    if not cert.verdict:
        raise WitnessError(
            "conditions fail, nothing to extract", certificate=cert
        )
    lw = cert.witnesses["L"]
    yw = cert.witnesses["Y"]
    d = s.value_dim
    table = s.parent.table
    first = Colligation(
        rep=s.parent.rep.restrict(0),
        table=table,
        A=np.zeros((d, d), dtype=np.complex128),
        B=s.B1,
        C=lw,
        D=s.D1,
    )
    second = Colligation(
        rep=s.parent.rep.restrict(1),
        table=table,
        A=np.zeros((d, d), dtype=np.complex128),
        B=yw,
        C=s.C2,
        D=s.D3,
    )
    _require_isometric(first, second, atol, cert)
    return first, second


def check_general(
    s: SplitColligation, a1, a2, x1, y2, atol: float = DEFAULT_ATOL
) -> FactorizationCertificate:
    """Certificate for the general factorization conditions.

    The witness four-tuple must split the parent blocks as A = A1 A2,
    B2 = A1 Y2, C1 = X1 A2, D2 = X1 Y2, with [A1; X1] an isometric
    column and A2* injective on range(A1* B1 + X1* D1).  The last
    condition is boolean and its residual is reported as 0 or 1.
    """
    d = s.value_dim
    n1, n2 = s.dims
    a1w = as_matrix(a1, "witness A1")
    a2w = as_matrix(a2, "witness A2")
    x1w = as_matrix(x1, "witness X1")
    y2w = as_matrix(y2, "witness Y2")
    for name, mat, shape in (
        ("A1", a1w, (d, d)),
        ("A2", a2w, (d, d)),
        ("X1", x1w, (n1, d)),
        ("Y2", y2w, (d, n2)),
    ):
        if mat.shape != shape:
            raise DimensionError(f"witness {name} is {mat.shape}, expected {shape}")
    coupling = a1w.conj().T @ s.B1 + x1w.conj().T @ s.D1
    residuals = {
        "a_splits": max_abs(s.A - a1w @ a2w),
        "b2_splits": max_abs(s.B2 - a1w @ y2w),
        "c1_splits": max_abs(s.C1 - x1w @ a2w),
        "d2_splits": max_abs(s.D2 - x1w @ y2w),
        "column_isometry": max_abs(
            a1w.conj().T @ a1w + x1w.conj().T @ x1w - np.eye(d)
        ),
        "injectivity": 0.0
        if injective_on_range(a2w.conj().T, coupling, atol)
        else 1.0,
    }
    verdict = all(v <= atol for v in residuals.values())
    return FactorizationCertificate(
        variant="general",
        witnesses={"A1": a1w, "A2": a2w, "X1": x1w, "Y2": y2w},
        residuals=residuals,
        atol=atol,
        verdict=verdict,
    )


def solve_general_witnesses(
    s: SplitColligation, a1, a2, atol: float = DEFAULT_ATOL
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares completion of a general witness from (A1, A2).

    X1 solves X1 A2 = C1 by right division with the pseudo-inverse, Y2
    solves A1 Y2 = B2 by left division, and the full four-tuple is then
    re-checked.  Raises WitnessError carrying the measured residuals if
    the completed tuple fails any condition; for singular A1 or A2 the
    least-squares pick can miss witnesses another completion would find.
    """
    a1w = as_matrix(a1, "witness A1")
    a2w = as_matrix(a2, "witness A2")
    gap = max_abs(s.A - a1w @ a2w)
    if gap > atol:
        raise WitnessError(
            f"A1 A2 misses the parent base block by {gap:.3e}"
        )
    x1 = s.C1 @ np.linalg.pinv(a2w)
    y2 = np.linalg.pinv(a1w) @ s.B2
    cert = check_general(s, a1w, a2w, x1, y2, atol)
    if not cert.verdict:
        raise WitnessError(
            "least-squares completion fails the conditions", certificate=cert
        )
    return x1, y2


def extract_general(
    s: SplitColligation, a1, a2, x1, y2, atol: float = DEFAULT_ATOL
) -> tuple[Colligation, Colligation]:
    """Rebuild the two factors certified by check_general.

    The factors are [[A1, B1], [X1, D1]] and [[A2, Y2], [C2, D3]].
    """
    cert = check_general(s, a1, a2, x1, y2, atol)
    if not cert.verdict:
        raise WitnessError(
            "conditions fail, nothing to extract", certificate=cert
        )
    table = s.parent.table
    first = Colligation(
        rep=s.parent.rep.restrict(0),
        table=table,
        A=cert.witnesses["A1"].copy(),
        B=s.B1,
        C=cert.witnesses["X1"].copy(),
        D=s.D1,
    )
    second = Colligation(
        rep=s.parent.rep.restrict(1),
        table=table,
        A=cert.witnesses["A2"].copy(),
        B=cert.witnesses["Y2"].copy(),
        C=s.C2,
        D=s.D3,
    )
    _require_isometric(first, second, 10.0 * atol, cert)
    return first, second


def verify_factorization(
    parent: Colligation, f1: Colligation, f2: Colligation
) -> float:
    """Worst pointwise defect of parent = f1 * f2 over all points.

    All three colligations must share the value dimension and the exact
    same sampled family.
    """
    if not (
        parent.value_dim == f1.value_dim == f2.value_dim
    ):
        raise DimensionError(
            f"value dimensions differ: {parent.value_dim}, "
            f"{f1.value_dim}, {f2.value_dim}"
        )
    if not (
        parent.table.same_family(f1.table) and parent.table.same_family(f2.table)
    ):
        raise StructureError("factors are sampled on different families")
    worst = 0.0
    for i in range(parent.table.n):
        defect = max_abs(evaluate(parent, i) - evaluate(f1, i) @ evaluate(f2, i))
        worst = max(worst, defect)
    return worst


def _require_isometric(
    first: Colligation,
    second: Colligation,
    atol: float,
    cert: FactorizationCertificate,
) -> None:
    """Reject extracted factors that are not isometric.

    A certified check makes this unreachable in exact arithmetic; it
    fires only on numerically inconsistent witnesses, which must be
    reported rather than silently accepted.
    """
    for name, col in (("first", first), ("second", second)):
        if not is_isometry(col.matrix(), atol):
            raise WitnessError(
                f"extracted {name} factor is not isometric at {atol:.3e}; "
                "the witness is numerically inconsistent",
                certificate=cert,
            )
