"""Column-major sparse matrices over Z/p.

Every matrix is a list of sparse columns; a column is a list of
(row_index, coeff) pairs with strictly increasing row indices and no zero
coefficients.  The pivot of a column is the row index of its last entry.
This is the single representation consumed by all reduction and update
kernels, so the operations here are written for tight constants: kernels
work on the raw entry lists and wrap results without re-validation.

Columns are treated as immutable once built.  Structural operations
(permutations, inserts, deletes) return new matrices; column handles are
shared where the operation allows it, which makes column permutation and
column insertion O(ncols) pointer moves.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import StructuralError, UsageError
from .field import PrimeField

Entry = Tuple[int, int]


class SparseColumn:
    """Sorted sparse vector: entries (row_index, coeff), coeff != 0."""

    __slots__ = ("entries",)

    def __init__(self, entries: Optional[List[Entry]] = None):
        self.entries: List[Entry] = entries if entries is not None else []

    @classmethod
    def from_pairs(cls, pairs: Iterable[Entry], field: PrimeField) -> "SparseColumn":
        """Build a column from unsorted/unreduced pairs, validating invariants."""
        reduced = [(i, field.normalize(c)) for i, c in pairs]
        reduced = [(i, c) for i, c in reduced if c != 0]
        reduced.sort()
        for k in range(1, len(reduced)):
            if reduced[k - 1][0] == reduced[k][0]:
                raise UsageError(f"duplicate row index {reduced[k][0]} in column")
        return cls(reduced)

    def pivot(self) -> Optional[int]:
        """Largest row index with a nonzero entry, or None for a zero column."""
        return self.entries[-1][0] if self.entries else None

    def pivot_coeff(self) -> int:
        return self.entries[-1][1]

    def is_zero(self) -> bool:
        return not self.entries

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def get(self, i: int) -> int:
        for r, c in self.entries:
            if r == i:
                return c
            if r > i:
                break
        return 0

    def copy(self) -> "SparseColumn":
        return SparseColumn(list(self.entries))

    def __eq__(self, other):
        return isinstance(other, SparseColumn) and other.entries == self.entries

    def __hash__(self):
        return hash(tuple(self.entries))

    def __repr__(self):
        return f"SparseColumn({self.entries!r})"


def pivot(c: SparseColumn) -> Optional[int]:
    return c.entries[-1][0] if c.entries else None


def _axpy_entries(tgt: List[Entry], alpha: int, src: List[Entry], p: int) -> List[Entry]:
    """Merged entries of tgt + alpha*src over Z/p; cancellations dropped."""
    if alpha == 0 or not src:
        return list(tgt)
    out: List[Entry] = []
    append = out.append
    i = j = 0
    nt, ns = len(tgt), len(src)
    if p == 2:
        # alpha is 1; the merge is a sorted symmetric difference
        while i < nt and j < ns:
            ti = tgt[i]
            sj = src[j]
            ri, rj = ti[0], sj[0]
            if ri < rj:
                append(ti)
                i += 1
            elif ri > rj:
                append(sj)
                j += 1
            else:
                i += 1
                j += 1
        if i < nt:
            out.extend(tgt[i:])
        if j < ns:
            out.extend(src[j:])
        return out
    while i < nt and j < ns:
        ti = tgt[i]
        sj = src[j]
        ri, rj = ti[0], sj[0]
        if ri < rj:
            append(ti)
            i += 1
        elif ri > rj:
            append((rj, (alpha * sj[1]) % p))
            j += 1
        else:
            c = (ti[1] + alpha * sj[1]) % p
            if c:
                append((ri, c))
            i += 1
            j += 1
    if i < nt:
        out.extend(tgt[i:])
    while j < ns:
        sj = src[j]
        append((sj[0], (alpha * sj[1]) % p))
        j += 1
    return out


def axpy(target: SparseColumn, alpha: int, source: SparseColumn, field: PrimeField) -> SparseColumn:
    """target + alpha*source as a fresh column; O(|target| + |source|)."""
    return SparseColumn(_axpy_entries(target.entries, field.normalize(alpha), source.entries, field.p))


class Permutation:
    """A bijection on [0, n): position i maps to image[i]."""

    __slots__ = ("image",)

    def __init__(self, image: Sequence[int]):
        n = len(image)
        seen = [False] * n
        for v in image:
            if not 0 <= v < n or seen[v]:
                raise UsageError("permutation image is not a bijection on [0,n)")
            seen[v] = True
        self.image = list(image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        p = cls.__new__(cls)
        p.image = list(range(n))
        return p

    @classmethod
    def _trusted(cls, image: List[int]) -> "Permutation":
        p = cls.__new__(cls)
        p.image = image
        return p

    def __len__(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __eq__(self, other):
        return isinstance(other, Permutation) and other.image == self.image

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for i, v in enumerate(self.image):
            inv[v] = i
        return Permutation._trusted(inv)

    def __repr__(self):
        return f"Permutation({self.image!r})"


def _count_inversions(seq: List[int]) -> int:
    """Merge-count of pairs i<j with seq[i] > seq[j]; O(n log n)."""
    n = len(seq)
    if n < 2:
        return 0
    buf = list(seq)
    tmp = [0] * n
    total = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[i] <= buf[j]:
                    tmp[k] = buf[i]
                    i += 1
                else:
                    tmp[k] = buf[j]
                    j += 1
                    total += mid - i
                k += 1
            while i < mid:
                tmp[k] = buf[i]
                i += 1
                k += 1
            while j < hi:
                tmp[k] = buf[j]
                j += 1
                k += 1
            buf[lo:hi] = tmp[lo:hi]
        width *= 2
    return total


def kendall_tau(perm: Permutation) -> int:
    """Number of inversion pairs between perm and the identity."""
    return _count_inversions(perm.image)


def normalized_kendall_tau(perm: Permutation) -> float:
    n = len(perm)
    if n < 2:
        return 0.0
    return kendall_tau(perm) / (n * (n - 1) / 2)


def _complement_map(old_count: int, insert_positions: Sequence[int]) -> List[int]:
    """Map old index -> final index once insert_positions are occupied by new slots."""
    total = old_count + len(insert_positions)
    taken = set(insert_positions)
    mapping = []
    old = 0
    for pos in range(total):
        if pos in taken:
            continue
        mapping.append(pos)
        old += 1
    if len(mapping) != old_count:
        raise UsageError("insert positions out of range for grown axis")
    return mapping


def _check_positions(positions: Sequence[int], total: int) -> None:
    prev = -1
    for pos in positions:
        if pos <= prev:
            raise UsageError("insert positions must be sorted and distinct")
        if not 0 <= pos < total:
            raise UsageError(f"insert position {pos} out of range for size {total}")
        prev = pos


class ColumnMatrix:
    """A field, dimensions, and ncols sparse columns."""

    __slots__ = ("nrows", "ncols", "columns", "field", "_nnz")

    def __init__(self, nrows: int, ncols: int, columns: List[SparseColumn], field: PrimeField):
        self.nrows = nrows
        self.ncols = ncols
        self.columns = columns
        self.field = field
        self._nnz = sum(len(c.entries) for c in columns)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: PrimeField) -> "ColumnMatrix":
        return cls(nrows, ncols, [SparseColumn() for _ in range(ncols)], field)

    @classmethod
    def identity(cls, n: int, field: PrimeField) -> "ColumnMatrix":
        return cls(n, n, [SparseColumn([(j, 1)]) for j in range(n)], field)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, triples: Iterable[Tuple[int, int, int]],
                     field: PrimeField) -> "ColumnMatrix":
        """Build from (row, col, value) triples; values reduced mod p."""
        per_col: List[List[Entry]] = [[] for _ in range(ncols)]
        for i, j, v in triples:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise UsageError(f"entry ({i},{j}) outside {nrows}x{ncols}")
            per_col[j].append((i, v))
        cols = [SparseColumn.from_pairs(pairs, field) for pairs in per_col]
        return cls(nrows, ncols, cols, field)

    @property
    def nnz(self) -> int:
        return self._nnz

    def column(self, j: int) -> SparseColumn:
        return self.columns[j]

    def set_column(self, j: int, col: SparseColumn) -> None:
        self._nnz += len(col.entries) - len(self.columns[j].entries)
        self.columns[j] = col

    def get(self, i: int, j: int) -> int:
        return self.columns[j].get(i)

    def copy(self) -> "ColumnMatrix":
        # column objects are immutable by convention, so handles are shared
        return ColumnMatrix(self.nrows, self.ncols, list(self.columns), self.field)

    def deep_copy(self) -> "ColumnMatrix":
        return ColumnMatrix(self.nrows, self.ncols, [c.copy() for c in self.columns], self.field)

    def to_dense(self):
        """Dense list-of-rows; for oracles and debugging only."""
        dense = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.entries:
                dense[i][j] = v
        return dense

    def __eq__(self, other):
        return (isinstance(other, ColumnMatrix) and other.nrows == self.nrows
                and other.ncols == self.ncols and other.field == self.field
                and other.columns == self.columns)

    def __repr__(self):
        return f"<ColumnMatrix {self.nrows}x{self.ncols} mod {self.field.p} nnz={self._nnz}>"

    # -- structural operations ------------------------------------------------

    def permute_rows(self, perm: Permutation) -> "ColumnMatrix":
        """Relabel row i as perm(i) in every column; O(nnz log nrows)."""
        if len(perm) != self.nrows:
            raise UsageError(f"row permutation size {len(perm)} != nrows {self.nrows}")
        if perm.is_identity():
            return self.copy()
        img = perm.image
        cols = []
        for col in self.columns:
            ent = [(img[i], v) for i, v in col.entries]
            ent.sort()
            cols.append(SparseColumn(ent))
        return ColumnMatrix(self.nrows, self.ncols, cols, self.field)

    def permute_cols(self, perm: Permutation) -> "ColumnMatrix":
        """Move column j to position perm(j); handle exchange only."""
        if len(perm) != self.ncols:
            raise UsageError(f"column permutation size {len(perm)} != ncols {self.ncols}")
        cols: List[Optional[SparseColumn]] = [None] * self.ncols
        for j, col in enumerate(self.columns):
            cols[perm.image[j]] = col
        return ColumnMatrix(self.nrows, self.ncols, cols, self.field)  # type: ignore[arg-type]

    def delete_trailing(self, k_r: int, k_c: int) -> "ColumnMatrix":
        """Drop the final k_r rows and k_c columns.

        Valid only when the deleted rows carry no entries outside the deleted
        columns; surviving columns are handle-shared, so this is a validation
        scan plus an O(ncols) slice.
        """
        if not (0 <= k_r <= self.nrows and 0 <= k_c <= self.ncols):
            raise UsageError("deletion counts exceed matrix dimensions")
        new_rows = self.nrows - k_r
        survivors = self.columns[: self.ncols - k_c]
        for j, col in enumerate(survivors):
            if col.entries and col.entries[-1][0] >= new_rows:
                raise StructuralError(
                    f"deleting trailing rows would drop entry at row "
                    f"{col.entries[-1][0]}, column {j}")
        return ColumnMatrix(new_rows, self.ncols - k_c, list(survivors), self.field)

    def delete_leading(self, k_r: int, k_c: int) -> "ColumnMatrix":
        """Drop the initial k_r rows and k_c columns, keeping the trailing block.

        The deleted columns must be supported entirely in the deleted rows
        (the lower-left block of the matrix must be zero); entries of
        surviving columns that sit in deleted rows belong to the discarded
        upper band and are dropped.
        """
        if not (0 <= k_r <= self.nrows and 0 <= k_c <= self.ncols):
            raise UsageError("deletion counts exceed matrix dimensions")
        for j in range(k_c):
            col = self.columns[j]
            if col.entries and col.entries[-1][0] >= k_r:
                raise StructuralError(
                    f"deleting leading columns would orphan entry at row "
                    f"{col.entries[-1][0]}, column {j}")
        cols = []
        for col in self.columns[k_c:]:
            ent = [(i - k_r, v) for i, v in col.entries if i >= k_r]
            cols.append(SparseColumn(ent))
        return ColumnMatrix(self.nrows - k_r, self.ncols - k_c, cols, self.field)

    def insert_rows(self, positions: Sequence[int]) -> "ColumnMatrix":
        """Insert all-zero rows so they land at the given final positions."""
        if not positions:
            return self.copy()
        new_rows = self.nrows + len(positions)
        _check_positions(positions, new_rows)
        old_to_new = _complement_map(self.nrows, positions)
        cols = []
        for col in self.columns:
            if col.entries:
                cols.append(SparseColumn([(old_to_new[i], v) for i, v in col.entries]))
            else:
                cols.append(col)
        return ColumnMatrix(new_rows, self.ncols, cols, self.field)

    def insert_cols(self, positions: Sequence[int], new_cols: Sequence[SparseColumn]) -> "ColumnMatrix":
        """Splice new_cols in so they land at the given final positions."""
        if len(positions) != len(new_cols):
            raise UsageError("insert_cols: positions and columns differ in length")
        if not positions:
            return self.copy()
        total = self.ncols + len(positions)
        _check_positions(positions, total)
        for col in new_cols:
            if col.entries and col.entries[-1][0] >= self.nrows:
                raise UsageError("inserted column has a row index out of range")
        cols: List[Optional[SparseColumn]] = [None] * total
        for pos, col in zip(positions, new_cols):
            cols[pos] = col
        it = iter(self.columns)
        for pos in range(total):
            if cols[pos] is None:
                cols[pos] = next(it)
        return ColumnMatrix(self.nrows, total, cols, self.field)  # type: ignore[arg-type]

    def anti_transpose(self) -> "ColumnMatrix":
        """J * A^T * J: entry (i, j) moves to (ncols-1-j, nrows-1-i)."""
        m, n = self.nrows, self.ncols
        out_entries: List[List[Entry]] = [[] for _ in range(m)]
        for j in range(n - 1, -1, -1):
            r = n - 1 - j
            for i, v in self.columns[j].entries:
                out_entries[m - 1 - i].append((r, v))
        cols = [SparseColumn(ent) for ent in out_entries]
        return ColumnMatrix(n, m, cols, self.field)


def row_times_matrix(row: SparseColumn, V: ColumnMatrix) -> SparseColumn:
    """The row vector row^T * V, returned with column indices as 'rows'."""
    if row.entries and row.entries[-1][0] >= V.nrows:
        raise UsageError("row vector index exceeds matrix row count")
    if not row.entries:
        return SparseColumn()
    coeffs = dict(row.entries)
    p = V.field.p
    out: List[Entry] = []
    for j, col in enumerate(V.columns):
        s = 0
        for i, v in col.entries:
            c = coeffs.get(i)
            if c is not None:
                s += c * v
        s %= p
        if s:
            out.append((j, s))
    return SparseColumn(out)


def matmul(A: ColumnMatrix, B: ColumnMatrix) -> ColumnMatrix:
    """Sparse product A*B; used for factorization checks, not in kernels."""
    if A.ncols != B.nrows:
        raise UsageError(f"matmul shapes {A.nrows}x{A.ncols} and {B.nrows}x{B.ncols}")
    p = A.field.p
    cols = []
    for bcol in B.columns:
        acc: List[Entry] = []
        for i, v in bcol.entries:
            acc = _axpy_entries(acc, v, A.columns[i].entries, p)
        cols.append(SparseColumn(acc))
    return ColumnMatrix(A.nrows, B.ncols, cols, A.field)


def dump_triples(A: ColumnMatrix) -> str:
    """Debug text dump: one 'row col value' line per nonzero, sorted."""
    triples = []
    for j, col in enumerate(A.columns):
        for i, v in col.entries:
            triples.append((i, j, v))
    triples.sort()
    return "\n".join(f"{i} {j} {v}" for i, j, v in triples)
