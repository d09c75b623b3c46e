"""Finite test-function families, sampled kernels, and positivity checks.

A family is stored as a table of values: row j holds test function j
sampled on a fixed finite point set whose index 0 entry is the base
point.  Kernels over the same point set are stored as dense blocks.
The checks in this module are all finite-sample certificates: they can
refute positivity on the sampled data but never prove the full
quantified statement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, StructureError
from .linalg import DEFAULT_ATOL, as_matrix, is_psd, max_abs

__all__ = [
    "PointSet",
    "TestFunctionTable",
    "TableDiagnostics",
    "HermitianKernel",
    "validate_test_family",
    "eval_map",
    "is_admissible",
    "cp_kernel_check",
    "schur_agler_witness_check",
    "agler_norm_lower_bound",
    "disc_points",
    "disc_table",
    "szego_samples",
]


@dataclass(frozen=True)
class PointSet:
    """Ordered distinct point labels; index 0 is the base point."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if not self.labels:
            raise StructureError("point set must contain at least one point")
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("point labels must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class TestFunctionTable:
    """Values of m test functions on n points, shape (m, n).

    values[j, i] is test function j at point i.  Shape and finiteness
    are enforced here; the semantic invariants (strict contractivity,
    vanishing at the base point, point separation) are reported by
    validate_test_family so that broken tables can still be inspected.
    """

    points: PointSet
    values: np.ndarray

    def __post_init__(self):
        v = as_matrix(self.values, "test function table")
        if v.shape[0] < 1:
            raise StructureError("a family needs at least one test function")
        if v.shape[1] != self.points.n:
            raise DimensionError(
                f"table has {v.shape[1]} columns for {self.points.n} points"
            )
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.points.n

    def same_family(self, other: "TestFunctionTable") -> bool:
        """Identical points and identical sampled values."""
        return self.points == other.points and np.array_equal(
            self.values, other.values
        )


@dataclass(frozen=True)
class TableDiagnostics:
    """Per-invariant verdicts for a table, with offending indices."""

    contractive: bool
    contractivity_violations: tuple[int, ...]
    base_point_centered: bool
    base_point_violations: tuple[int, ...]
    separating: bool
    separation_violations: tuple[tuple[int, int], ...]

    @property
    def passed(self) -> bool:
        return self.contractive and self.base_point_centered and self.separating


def validate_test_family(
    t: TestFunctionTable, atol: float = 0.0
) -> TableDiagnostics:
    """Check the three family invariants, reporting instead of raising.

    Contractivity is strict: every sampled value must have modulus
    below 1.  The base-point column must vanish within atol, and every
    pair of points must be separated by more than atol under at least
    one test function.  The default atol of 0.0 demands exact zeros and
    accepts any nonzero separation.
    """
    v = t.values
    bad_points = tuple(
        int(i) for i in range(t.n) if float(np.max(np.abs(v[:, i]))) >= 1.0
    )
    bad_base = tuple(
        int(j) for j in range(t.m) if float(np.abs(v[j, 0])) > atol
    )
    bad_pairs = []
    for i in range(t.n):
        for k in range(i + 1, t.n):
            if float(np.max(np.abs(v[:, i] - v[:, k]))) <= atol:
                bad_pairs.append((i, k))
    return TableDiagnostics(
        contractive=not bad_points,
        contractivity_violations=bad_points,
        base_point_centered=not bad_base,
        base_point_violations=bad_base,
        separating=not bad_pairs,
        separation_violations=tuple(bad_pairs),
    )


def eval_map(t: TestFunctionTable, i: int) -> np.ndarray:
    """Column i of the table: all m test functions at point i."""
    if not 0 <= i < t.n:
        raise IndexError(f"point index {i} out of range for {t.n} points")
    return t.values[:, i].copy()


@dataclass(frozen=True, eq=False)
class HermitianKernel:
    """Kernel samples on a point set: an n x n grid of d x d blocks.

    blocks[i, j] holds the kernel at (point i, point j); the assembled
    n*d square matrix is expected to be Hermitian.
    """

    points: PointSet
    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=np.complex128)
        if b.ndim != 4:
            raise DimensionError(
                f"kernel blocks must be 4-D (n, n, d, d), got shape {b.shape}"
            )
        n = self.points.n
        if b.shape[0] != n or b.shape[1] != n:
            raise DimensionError(
                f"kernel grid is {b.shape[0]}x{b.shape[1]} for {n} points"
            )
        if b.shape[2] != b.shape[3]:
            raise DimensionError(
                f"kernel blocks must be square, got {b.shape[2]}x{b.shape[3]}"
            )
        if not np.all(np.isfinite(b.real)) or not np.all(np.isfinite(b.imag)):
            raise ValueError("kernel contains non-finite entries")
        object.__setattr__(self, "blocks", b)

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def block_dim(self) -> int:
        return self.blocks.shape[2]

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i, j]

    def assemble(self) -> np.ndarray:
        """Flatten the block grid into one n*d square matrix."""
        n, d = self.n, self.block_dim
        return self.blocks.transpose(0, 2, 1, 3).reshape(n * d, n * d)

    def hermiticity_defect(self) -> float:
        a = self.assemble()
        return max_abs(a - a.conj().T)


def _assemble_scaled(kernel: HermitianKernel, factor: np.ndarray) -> np.ndarray:
    scaled = kernel.blocks * factor[:, :, None, None]
    n, d = kernel.n, kernel.block_dim
    return scaled.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def is_admissible(
    s: HermitianKernel, t: TestFunctionTable, atol: float = DEFAULT_ATOL
) -> bool:
    """True iff ``s`` stays positive against every function in ``t``.

    For each test function psi the matrix with (i, j) block
    (1 - psi(x_i) * conj(psi(x_j))) * S(x_i, x_j) must be positive
    semidefinite.  Row index carries the first kernel argument.
    """
    if s.points != t.points:
        raise StructureError("kernel and table are sampled on different points")
    for j in range(t.m):
        psi = t.values[j]
        factor = 1.0 - psi[:, None] * psi[None, :].conj()
        if not is_psd(_assemble_scaled(s, factor), atol):
            return False
    return True


def cp_kernel_check(
    k: Callable[[int, int, np.ndarray], np.ndarray],
    t: TestFunctionTable,
    samples: Sequence[tuple],
    atol: float = DEFAULT_ATOL,
) -> bool:
    """Sampled complete-positivity check for a two-argument kernel.

    ``k(i, j, g)`` must return the kernel block at (point i, point j)
    applied to the coefficient vector g of length t.m.  Each sample is a
    triple (indices, operators, functions): point indices, one square
    matrix per index, and one length-m coefficient vector per index.
    For every sample the assembly with (a, b) block

        operators[b]* @ k(i_a, i_b, conj(f_b) * f_a) @ operators[a]

    must be positive semidefinite.  This refutes complete positivity on
    the sampled data; it cannot certify the full quantified property.
    """
    for sample in samples:
        try:
            indices, operators, functions = sample
        except (TypeError, ValueError) as exc:
            raise StructureError(
                "each sample must be (indices, operators, functions)"
            ) from exc
        count = len(indices)
        if len(operators) != count or len(functions) != count:
            raise DimensionError(
                "sample pieces must share one length, got "
                f"{count}, {len(operators)}, {len(functions)}"
            )
        if count == 0:
            continue
        ops = [as_matrix(op, "sample operator") for op in operators]
        dim = ops[0].shape[0]
        for op in ops:
            if op.shape != (dim, dim):
                raise DimensionError("sample operators must be square and equal sized")
        funs = []
        for f in functions:
            fv = np.asarray(f, dtype=np.complex128).reshape(-1)
            if fv.shape[0] != t.m:
                raise DimensionError(
                    f"coefficient vector has length {fv.shape[0]}, expected {t.m}"
                )
            funs.append(fv)
        for i in indices:
            if not 0 <= int(i) < t.n:
                raise IndexError(f"sample point index {i} out of range")
        grid = np.zeros((count, count, dim, dim), dtype=np.complex128)
        for a in range(count):
            for b in range(count):
                block = as_matrix(
                    k(int(indices[a]), int(indices[b]), np.conj(funs[b]) * funs[a]),
                    "kernel value",
                )
                if block.shape != (dim, dim):
                    raise DimensionError(
                        f"kernel block is {block.shape}, expected {(dim, dim)}"
                    )
                grid[a, b] = ops[b].conj().T @ block @ ops[a]
        assembly = grid.transpose(0, 2, 1, 3).reshape(count * dim, count * dim)
        if not is_psd(assembly, atol):
            return False
    return True


def schur_agler_witness_check(
    fvals,
    s: HermitianKernel,
    bound: float,
    atol: float = DEFAULT_ATOL,
) -> bool:
    """Positivity of the bound witness against one kernel.

    fvals is the list of d x d function values, one per point of s.
    Checks that the matrix with (i, j) block

        (bound**2 * I - f(x_i)* @ f(x_j)) kron conj(S(x_i, x_j))

    is positive semidefinite.  The adjoint sits on the row index and the
    kernel block enters conjugated; this is the pairing that stays
    positive for operator-valued functions (the unconjugated pairing is
    a partial transpose of it and can go indefinite for value dimension
    2 and up).  For scalar values and scalar kernels it coincides with
    the classical Pick-matrix arrangement.
    """
    if bound < 0:
        raise ValueError(f"bound must be nonnegative, got {bound}")
    f = _as_value_stack(fvals)
    if f.shape[0] != s.n:
        raise StructureError(
            f"{f.shape[0]} function values supplied for {s.n} kernel points"
        )
    d = f.shape[1]
    df = s.block_dim
    eye = np.eye(d)
    size = d * df
    n = s.n
    assembly = np.zeros((n * size, n * size), dtype=np.complex128)
    c2 = float(bound) ** 2
    for i in range(n):
        for j in range(n):
            head = c2 * eye - f[i].conj().T @ f[j]
            assembly[
                i * size : (i + 1) * size, j * size : (j + 1) * size
            ] = np.kron(head, s.block(i, j).conj())
    return is_psd(assembly, atol)


def agler_norm_lower_bound(
    fvals,
    kernels: Sequence[HermitianKernel],
    atol: float = DEFAULT_ATOL,
) -> float:
    """Smallest bound passing the witness check on every sampled kernel.

    Bisects on the squared bound until the bracket width drops below
    atol and returns the certified upper end.  This is a lower bound
    for the true norm: adding kernels can only push it up.
    """
    if not kernels:
        raise StructureError("at least one kernel is required")
    f = _as_value_stack(fvals)
    for s in kernels:
        if s.n != f.shape[0]:
            raise StructureError(
                f"kernel sampled on {s.n} points, function values on {f.shape[0]}"
            )
        if not is_psd(s.assemble(), atol):
            raise StructureError("every kernel must be positive as assembled")

    def passes(c: float) -> bool:
        return all(schur_agler_witness_check(f, s, c, atol) for s in kernels)

    if passes(0.0):
        return 0.0
    top = 2.0 * max(
        float(np.linalg.norm(f[i], ord=2)) for i in range(f.shape[0])
    ) + 1.0
    hi2 = top * top
    # the theory guarantees a passing bound at the bracket top; widen a
    # few times in case rounding lands it exactly on the boundary
    for _ in range(8):
        if passes(np.sqrt(hi2)):
            break
        hi2 *= 2.0
    else:
        raise StructureError("no passing bound found above the initial bracket")
    lo2 = 0.0
    while hi2 - lo2 > atol:
        mid = (lo2 + hi2) / 2.0
        if passes(np.sqrt(mid)):
            hi2 = mid
        else:
            lo2 = mid
    return float(np.sqrt(hi2))


def _as_value_stack(fvals) -> np.ndarray:
    """Stack per-point function values into shape (n, d, d)."""
    if isinstance(fvals, np.ndarray) and fvals.ndim == 3:
        stack = np.asarray(fvals, dtype=np.complex128)
    else:
        mats = [as_matrix(f, "function value") for f in fvals]
        if not mats:
            raise StructureError("at least one function value is required")
        stack = np.stack(mats)
    if stack.shape[1] != stack.shape[2]:
        raise DimensionError(
            f"function values must be square, got {stack.shape[1]}x{stack.shape[2]}"
        )
    return stack


def disc_points(zs: Sequence[complex]) -> PointSet:
    """Point set labeled by the complex coordinates themselves."""
    return PointSet(tuple(str(complex(z)) for z in zs))


def disc_table(zs: Sequence[complex]) -> TestFunctionTable:
    """Single-function family: the coordinate sampled at ``zs``.

    The first entry must be 0 so the base point sits at index 0.
    """
    values = np.asarray([list(zs)], dtype=np.complex128)
    return TestFunctionTable(disc_points(zs), values)


def szego_samples(zs: Sequence[complex], power: int = 1) -> HermitianKernel:
    """Scalar kernel 1 / (1 - z * conj(w)) ** power sampled at ``zs``."""
    if power < 1:
        raise ValueError(f"power must be at least 1, got {power}")
    z = np.asarray(list(zs), dtype=np.complex128)
    denom = 1.0 - z[:, None] * z[None, :].conj()
    blocks = (1.0 / denom ** power)[:, :, None, None]
    return HermitianKernel(disc_points(zs), blocks)
