"""Factorization kernels maintaining D*V = R.

`reduce` is the standard left-to-right column reduction; `reduce_rowwise`
processes duplicate pivots bottom row up and produces the identical output.
`make_upper_triangular` repairs a row-permuted invertible matrix, and
`apply_clearing` transfers pivots of the next boundary's reduced matrix into
zero columns, skipping reductions whose outcome is already known.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import RankDeficiencyError, StructuralError, UsageError
from .field import PrimeField
from .sparsemat import ColumnMatrix, SparseColumn, _axpy_entries, matmul


@dataclass
class OperationCounters:
    """Work counters; the portable cost metric used instead of wall clock."""

    column_additions: int = 0
    pivot_eliminations: int = 0
    swaps: int = 0

    def add(self, other: "OperationCounters") -> None:
        self.column_additions += other.column_additions
        self.pivot_eliminations += other.pivot_eliminations
        self.swaps += other.swaps

    def copy(self) -> "OperationCounters":
        return OperationCounters(self.column_additions, self.pivot_eliminations, self.swaps)

    def total(self) -> int:
        return self.column_additions + self.pivot_eliminations + self.swaps


@dataclass
class RUDecomposition:
    """A pair (R, V) with D*V = R for the D it was created from.

    V is invertible upper-triangular (absent in no-basis mode); when
    `reduced` is set, the nonzero columns of R have pairwise distinct pivots.
    """

    R: ColumnMatrix
    V: Optional[ColumnMatrix]
    reduced: bool = False

    def clone(self) -> "RUDecomposition":
        return RUDecomposition(self.R.copy(), self.V.copy() if self.V is not None else None,
                               self.reduced)

    def check_against(self, D: ColumnMatrix) -> bool:
        """Exact sparse re-multiplication check; desk-scale only."""
        if self.V is None:
            raise UsageError("cannot check a no-basis decomposition")
        return matmul(D, self.V) == self.R


def reduce(A: ColumnMatrix, B: Optional[ColumnMatrix] = None,
           counters: Optional[OperationCounters] = None) -> Tuple[ColumnMatrix, Optional[ColumnMatrix]]:
    """Column-by-column reduction of A in place, mirroring every column
    operation onto B.

    When several earlier columns could supply a pivot they are already
    reduced, so the eliminating column is unique; each elimination strictly
    decreases the pivot, which bounds the work per column by min(m, n).
    """
    if B is not None and B.ncols != A.ncols:
        raise UsageError("basis matrix must have the same number of columns")
    if counters is None:
        counters = OperationCounters()
    p = A.field.p
    acols = A.columns
    bcols = B.columns if B is not None else None
    pivot_owner = {}
    for j in range(A.ncols):
        ent = acols[j].entries
        changed = False
        while ent:
            last = ent[-1]
            owner = pivot_owner.get(last[0])
            if owner is None:
                break
            alpha = (-last[1] * A.field.inv(acols[owner].entries[-1][1])) % p
            ent = _axpy_entries(ent, alpha, acols[owner].entries, p)
            changed = True
            counters.column_additions += 1
            if bcols is not None:
                B.set_column(j, SparseColumn(
                    _axpy_entries(bcols[j].entries, alpha, bcols[owner].entries, p)))
        if changed:
            A.set_column(j, SparseColumn(ent))
        if ent:
            pivot_owner[ent[-1][0]] = j
    return A, B


def reduce_rowwise(A: ColumnMatrix, B: Optional[ColumnMatrix] = None,
                   counters: Optional[OperationCounters] = None) -> Tuple[ColumnMatrix, Optional[ColumnMatrix]]:
    """Row-driven variant of `reduce`: visits rows bottom to top and
    eliminates duplicate pivots against the leftmost column in each bucket.
    Produces output identical to `reduce`.
    """
    if B is not None and B.ncols != A.ncols:
        raise UsageError("basis matrix must have the same number of columns")
    if counters is None:
        counters = OperationCounters()
    p = A.field.p
    acols = A.columns
    bcols = B.columns if B is not None else None
    buckets: dict = {}
    for j, col in enumerate(acols):
        if col.entries:
            buckets.setdefault(col.entries[-1][0], []).append(j)
    for i in range(A.nrows - 1, -1, -1):
        idx = buckets.get(i)
        if not idx or len(idx) == 1:
            continue
        idx.sort()
        keep = idx[0]
        keep_entries = acols[keep].entries
        keep_coeff_inv = A.field.inv(keep_entries[-1][1])
        for j in idx[1:]:
            ent = acols[j].entries
            alpha = (-ent[-1][1] * keep_coeff_inv) % p
            ent = _axpy_entries(ent, alpha, keep_entries, p)
            A.set_column(j, SparseColumn(ent))
            counters.column_additions += 1
            if bcols is not None:
                B.set_column(j, SparseColumn(
                    _axpy_entries(bcols[j].entries, alpha, bcols[keep].entries, p)))
            if ent:
                buckets.setdefault(ent[-1][0], []).append(j)
    return A, B


def make_upper_triangular(A: ColumnMatrix, B: Optional[ColumnMatrix] = None,
                          counters: Optional[OperationCounters] = None) -> Tuple[ColumnMatrix, Optional[ColumnMatrix]]:
    """Turn an invertible square A into upper-triangular form in place.

    Reduces A (each elimination here is a pivot elimination in the counters),
    then swaps columns so pivot(A[j]) = j; B receives the same column
    operations and swaps.
    """
    if A.nrows != A.ncols:
        raise UsageError(f"matrix must be square, got {A.nrows}x{A.ncols}")
    if counters is None:
        counters = OperationCounters()
    before = counters.column_additions
    reduce(A, B, counters)
    counters.pivot_eliminations += counters.column_additions - before
    n = A.ncols
    pos_of_pivot = [-1] * n
    for j, col in enumerate(A.columns):
        if not col.entries:
            raise RankDeficiencyError(f"column {j} reduced to zero; matrix is singular")
        pos_of_pivot[col.entries[-1][0]] = j
    acols = A.columns
    bcols = B.columns if B is not None else None
    for j in range(n):
        i = acols[j].entries[-1][0]
        if i != j:
            j2 = pos_of_pivot[j]
            acols[j], acols[j2] = acols[j2], acols[j]
            if bcols is not None:
                bcols[j], bcols[j2] = bcols[j2], bcols[j]
            pos_of_pivot[i] = j2
            pos_of_pivot[j] = j
            counters.swaps += 1
    return A, B


def apply_clearing(R0: ColumnMatrix, V0: Optional[ColumnMatrix],
                   R_next: ColumnMatrix) -> Tuple[ColumnMatrix, Optional[ColumnMatrix]]:
    """Zero the columns of R0 indexed by pivots of the reduced R_next and
    place the corresponding R_next columns into V0.

    Requires R_next to be reduced and the two matrices to come from
    consecutive boundaries of one chain complex.  Columns are copied, never
    aliased, so later in-place reduction cannot corrupt R_next.
    """
    R1 = R0.copy()
    V1 = V0.copy() if V0 is not None else None
    for col in R_next.columns:
        if not col.entries:
            continue
        i = col.entries[-1][0]
        if i >= R1.ncols:
            raise UsageError(
                f"pivot {i} of the next-dimension matrix exceeds {R1.ncols} columns")
        R1.set_column(i, SparseColumn())
        if V1 is not None:
            V1.set_column(i, col.copy())
    return R1, V1


def _validate_chain(boundaries: List[ColumnMatrix]) -> None:
    for q in range(len(boundaries) - 1):
        prod = matmul(boundaries[q], boundaries[q + 1])
        if prod.nnz != 0:
            raise StructuralError(f"boundary composition D_{q} * D_{q + 1} != 0")


def reduce_complex(boundaries: List[ColumnMatrix], mode: str = "homology",
                   use_clearing: bool = True, keep_basis: bool = True,
                   counters: Optional[OperationCounters] = None,
                   validate_chain: bool = False) -> List[RUDecomposition]:
    """Reduce a filtered chain complex given boundaries D_0..D_r.

    Homology reduces the boundaries in decreasing dimension; cohomology
    anti-transposes first and works in increasing dimension, with the
    top-dimension matrix trivial.  Either ordering lets each reduced matrix
    clear the next one processed.
    """
    if mode not in ("homology", "cohomology"):
        raise UsageError(f"unknown mode {mode!r}")
    if counters is None:
        counters = OperationCounters()
    if validate_chain:
        _validate_chain(boundaries)
    fld = boundaries[0].field if boundaries else PrimeField(2)
    r = len(boundaries) - 1
    decs: List[Optional[RUDecomposition]] = [None] * (r + 1)

    if mode == "homology":
        order = range(r, -1, -1)
        mats = boundaries
    else:
        mats = [boundaries[q + 1].anti_transpose() for q in range(r)]
        mats.append(ColumnMatrix.zeros(0, boundaries[r].ncols, fld))
        order = range(0, r + 1)

    prev_reduced: Optional[ColumnMatrix] = None
    for q in order:
        # kernels rebind columns rather than mutating them, so a handle copy
        # is enough to keep the caller's boundary matrices intact
        R = mats[q].copy() if mode == "homology" else mats[q]
        V = ColumnMatrix.identity(R.ncols, fld) if keep_basis else None
        if use_clearing and prev_reduced is not None:
            R, V = apply_clearing(R, V, prev_reduced)
        reduce(R, V, counters)
        decs[q] = RUDecomposition(R, V, reduced=True)
        prev_reduced = R
    return decs  # type: ignore[return-value]
