"""Warm-start updates of RU decompositions.

Each update transforms a valid decomposition of one filtered boundary matrix
into a valid decomposition for a permuted / grown / shrunk filtration,
without ever touching the boundary matrix itself: the permutation is pushed
through V and R, V is repaired to upper-triangular form, deleted cells are
sliced off a corner block, inserted cells arrive as raw rows/columns with
identity basis entries, and one final reduction restores unique pivots.

Permutations are given in image form: position i of the old filtration
maps to position perm(i).  For matrices in reverse filtration order
(cohomology), permutations and insert positions are expressed in the
reversed coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional

from .errors import UsageError
from .reduction import OperationCounters, RUDecomposition, apply_clearing, make_upper_triangular, reduce
from .sparsemat import ColumnMatrix, Permutation, SparseColumn, row_times_matrix

StageHook = Callable[[str, ColumnMatrix, ColumnMatrix], None]


@dataclass
class MatrixDiff:
    """How one filtered boundary matrix becomes another.

    Row data lives in the row-cell dimension, column data in the column-cell
    dimension; `new_cols` carries inserted boundary columns (forward order)
    and `new_rows` inserted coboundary rows (reverse order), both expressed
    in the final index space of the target filtration.
    """

    Q_r: Permutation
    Q_c: Permutation
    k_r: int = 0
    k_c: int = 0
    ins_rows: List[int] = dc_field(default_factory=list)
    ins_cols: List[int] = dc_field(default_factory=list)
    new_cols: List[SparseColumn] = dc_field(default_factory=list)
    new_rows: List[SparseColumn] = dc_field(default_factory=list)

    def is_empty(self) -> bool:
        return (self.k_r == 0 and self.k_c == 0 and not self.ins_rows
                and not self.ins_cols and self.Q_r.is_identity()
                and self.Q_c.is_identity())


def _require_basis(dec: RUDecomposition) -> ColumnMatrix:
    if dec.V is None:
        raise UsageError("updates require the decomposition to carry its basis V")
    return dec.V


def _expand_identity(V: ColumnMatrix, positions: List[int]) -> ColumnMatrix:
    """Insert rows and columns acting as the identity at the given positions."""
    if not positions:
        return V
    grown = V.insert_rows(positions)
    units = [SparseColumn([(pos, 1)]) for pos in positions]
    return grown.insert_cols(positions, units)


def update_permutation(dec: RUDecomposition, P_r: Permutation, P_c: Permutation,
                       counters: Optional[OperationCounters] = None,
                       clear_with: Optional[ColumnMatrix] = None,
                       stage_hook: Optional[StageHook] = None) -> RUDecomposition:
    """Update a decomposition of D to one of the row/column-permuted D.

    The input decomposition is left untouched.  `clear_with` may pass the
    already-reduced next-dimension matrix to skip known-zero columns in the
    final reduction.
    """
    V = _require_basis(dec)
    if counters is None:
        counters = OperationCounters()
    R = dec.R.permute_rows(P_r)
    V = V.permute_rows(P_c)
    if stage_hook:
        stage_hook("permuted", R, V)
    make_upper_triangular(V, R, counters)
    if stage_hook:
        stage_hook("triangularized", R, V)
    if clear_with is not None:
        R, V = apply_clearing(R, V, clear_with)
        if stage_hook:
            stage_hook("cleared", R, V)
    reduce(R, V, counters)
    if stage_hook:
        stage_hook("reduced", R, V)
    return RUDecomposition(R, V, reduced=True)


def general_update(dec: RUDecomposition, diff: MatrixDiff,
                   counters: Optional[OperationCounters] = None,
                   clear_with: Optional[ColumnMatrix] = None,
                   stage_hook: Optional[StageHook] = None) -> RUDecomposition:
    """Permutation + deletion + insertion update for a boundary matrix.

    Deleted cells must have been permuted into the trailing blocks; the
    deletion step validates the implied zero block and aborts with a
    structural error naming the offending entry otherwise.
    """
    V = _require_basis(dec)
    if counters is None:
        counters = OperationCounters()
    R = dec.R.permute_rows(diff.Q_r)
    V = V.permute_rows(diff.Q_c)
    if stage_hook:
        stage_hook("permuted", R, V)
    make_upper_triangular(V, R, counters)
    if stage_hook:
        stage_hook("triangularized", R, V)
    R = R.delete_trailing(diff.k_r, diff.k_c)
    V = V.delete_trailing(diff.k_c, diff.k_c)
    if stage_hook:
        stage_hook("deleted", R, V)
    R = R.insert_rows(diff.ins_rows)
    R = R.insert_cols(diff.ins_cols, diff.new_cols)
    V = _expand_identity(V, diff.ins_cols)
    if stage_hook:
        stage_hook("inserted", R, V)
    if clear_with is not None:
        R, V = apply_clearing(R, V, clear_with)
        if stage_hook:
            stage_hook("cleared", R, V)
    reduce(R, V, counters)
    if stage_hook:
        stage_hook("reduced", R, V)
    return RUDecomposition(R, V, reduced=True)


def general_update_cohomology(dec: RUDecomposition, diff: MatrixDiff,
                              counters: Optional[OperationCounters] = None,
                              clear_with: Optional[ColumnMatrix] = None,
                              stage_hook: Optional[StageHook] = None) -> RUDecomposition:
    """Update for matrices kept in reverse filtration order.

    Deletions leave through the leading block; new cells insert zero
    columns, while new coboundary rows enter as row * V so the factorization
    survives the splice.
    """
    V = _require_basis(dec)
    if counters is None:
        counters = OperationCounters()
    R = dec.R.permute_rows(diff.Q_r)
    V = V.permute_rows(diff.Q_c)
    if stage_hook:
        stage_hook("permuted", R, V)
    make_upper_triangular(V, R, counters)
    if stage_hook:
        stage_hook("triangularized", R, V)
    R = R.delete_leading(diff.k_r, diff.k_c)
    V = V.delete_leading(diff.k_c, diff.k_c)
    if stage_hook:
        stage_hook("deleted", R, V)
    zero_cols = [SparseColumn() for _ in diff.ins_cols]
    R = R.insert_cols(diff.ins_cols, zero_cols)
    V = _expand_identity(V, diff.ins_cols)
    R = R.insert_rows(diff.ins_rows)
    if diff.ins_rows:
        # rows enter as row * V; collect per-column additions, then rebuild
        # the touched columns in one pass so shared column handles stay intact
        extra: dict = {}
        for pos, raw in zip(diff.ins_rows, diff.new_rows):
            full = row_times_matrix(raw, V)
            for j, v in full.entries:
                extra.setdefault(j, []).append((pos, v))
        for j, added in extra.items():
            merged = sorted(R.columns[j].entries + added)
            R.set_column(j, SparseColumn(merged))
    if stage_hook:
        stage_hook("inserted", R, V)
    if clear_with is not None:
        R, V = apply_clearing(R, V, clear_with)
        if stage_hook:
            stage_hook("cleared", R, V)
    reduce(R, V, counters)
    if stage_hook:
        stage_hook("reduced", R, V)
    return RUDecomposition(R, V, reduced=True)
