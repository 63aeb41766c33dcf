"""Filtered complexes: grid lower-star (triangulated or cubical),
Vietoris-Rips, and the diff machinery that turns a pair of filtrations into
per-dimension update instructions.

Cells are identified by canonical integer-tuple keys: sorted vertex ids for
simplices, anchor coordinates followed by extent bits for cubes.  The
filtration order is the deterministic total order (value, dim, key); key
ties never depend on floating-point equality of values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import InputError, StructuralError, UsageError
from .field import PrimeField
from .sparsemat import ColumnMatrix, Permutation, SparseColumn, _count_inversions
from .update import MatrixDiff

Key = Tuple[int, ...]

ENCLOSING = "enc"


@dataclass
class Cell:
    """A single cell: dimension, canonical key, value, and signed boundary."""

    dim: int
    key: Key
    value: float
    boundary: List[Tuple[Key, int]]


class FilteredComplex:
    """Cells grouped by dimension, each dimension in filtration order."""

    def __init__(self, cells_by_dim: List[List[Cell]], kind: str, meta: dict,
                 report_dim: Optional[int] = None, validate: bool = True):
        self.cells_by_dim = cells_by_dim
        self.kind = kind
        self.meta = meta
        self.max_dim = len(cells_by_dim) - 1
        self.report_dim = self.max_dim if report_dim is None else report_dim
        for cells in cells_by_dim:
            cells.sort(key=lambda c: (c.value, c.key))
        self.index: List[Dict[Key, int]] = [
            {c.key: i for i, c in enumerate(cells)} for cells in cells_by_dim]
        if validate:
            self._validate()

    def _validate(self) -> None:
        for q, cells in enumerate(self.cells_by_dim):
            below = self.index[q - 1] if q > 0 else {}
            for c in cells:
                if c.dim != q:
                    raise StructuralError(f"cell {c.key} filed under dimension {q}")
                if not math.isfinite(c.value):
                    raise InputError(f"cell {c.key} has non-finite value {c.value}")
                for fkey, _ in c.boundary:
                    pos = below.get(fkey)
                    if pos is None:
                        raise StructuralError(f"face {fkey} of {c.key} missing from complex")
                    if self.cells_by_dim[q - 1][pos].value > c.value:
                        raise StructuralError(
                            f"face {fkey} appears after its coface {c.key}")

    def n_cells(self, q: int) -> int:
        if 0 <= q <= self.max_dim:
            return len(self.cells_by_dim[q])
        return 0

    def total_cells(self) -> int:
        return sum(len(cells) for cells in self.cells_by_dim)

    def values(self, q: int) -> List[float]:
        return [c.value for c in self.cells_by_dim[q]]

    def keys(self, q: int) -> List[Key]:
        return [c.key for c in self.cells_by_dim[q]]

    def boundary_matrices(self, fld: PrimeField) -> List[ColumnMatrix]:
        """One matrix per dimension; D_0 is the empty 0 x n_0 matrix."""
        mats = [ColumnMatrix.zeros(0, self.n_cells(0), fld)]
        for q in range(1, self.max_dim + 1):
            below = self.index[q - 1]
            cols = []
            for c in self.cells_by_dim[q]:
                ent = sorted((below[fkey], fld.normalize(coeff)) for fkey, coeff in c.boundary)
                cols.append(SparseColumn([(i, v) for i, v in ent if v]))
            mats.append(ColumnMatrix(self.n_cells(q - 1), self.n_cells(q), cols, fld))
        return mats

    def restrict(self, keep: Iterable[Key]) -> "FilteredComplex":
        """Sub-complex on the given keys; fails if the result is not closed."""
        keep_set = set(keep)
        cells = [[c for c in dim_cells if c.key in keep_set] for dim_cells in self.cells_by_dim]
        return FilteredComplex(cells, self.kind, dict(self.meta), self.report_dim)

    def key_signature(self) -> tuple:
        """Identity of the key space; diffing requires equal signatures."""
        return (self.kind, self.max_dim, tuple(sorted(self.meta.items())))


# -- grid filtrations ---------------------------------------------------------


def _as_grid(image) -> np.ndarray:
    arr = np.asarray(image, dtype=float)
    if arr.ndim not in (2, 3):
        raise InputError(f"grid must be 2D or 3D, got shape {arr.shape}")
    if arr.size == 0:
        raise InputError("grid has an empty axis")
    if not np.all(np.isfinite(arr)):
        raise InputError("grid contains non-finite values")
    return arr


def _poset_chains(d: int) -> List[List[Tuple[int, ...]]]:
    """All strictly increasing chains of length >= 2 in {0,1}^d."""
    corners = list(itertools.product((0, 1), repeat=d))

    def leq(u, v):
        return all(a <= b for a, b in zip(u, v)) and u != v

    chains: List[List[Tuple[int, ...]]] = []
    stack = [[c] for c in corners]
    while stack:
        chain = stack.pop()
        if len(chain) >= 2:
            chains.append(chain)
        for c in corners:
            if leq(chain[-1], c):
                stack.append(chain + [c])
    return chains


def lower_star_freudenthal(image) -> FilteredComplex:
    """Triangulate a grid (2 triangles per square, 6 tetrahedra per cube)
    and extend the vertex values by maxima over each simplex."""
    arr = _as_grid(image)
    shape = arr.shape
    d = arr.ndim
    flat = arr.ravel()
    strides = [int(np.prod(shape[a + 1:], dtype=int)) for a in range(d)]

    def vid(coord) -> int:
        return sum(c * s for c, s in zip(coord, strides))

    cells_by_dim: List[List[Cell]] = [[] for _ in range(d + 1)]
    for i, v in enumerate(flat):
        cells_by_dim[0].append(Cell(0, (i,), float(v), []))

    seen: Dict[Key, None] = {}
    chains = _poset_chains(d)
    for anchor in itertools.product(*(range(s) for s in shape)):
        for chain in chains:
            top = chain[-1]
            if any(a + o >= s for a, o, s in zip(anchor, top, shape)):
                continue
            key = tuple(vid(tuple(a + o for a, o in zip(anchor, off))) for off in chain)
            if key in seen:
                continue
            seen[key] = None
            dim = len(key) - 1
            value = max(flat[v] for v in key)
            boundary = [(key[:i] + key[i + 1:], (-1) ** i) for i in range(len(key))]
            cells_by_dim[dim].append(Cell(dim, key, float(value), boundary))
    # degenerate axes (size 1) support no top cells; the span is shape-determined
    while len(cells_by_dim) > 1 and not cells_by_dim[-1]:
        cells_by_dim.pop()
    return FilteredComplex(cells_by_dim, "freudenthal", {"shape": shape})


def lower_star_cubical(image) -> FilteredComplex:
    """Cubical cells on a grid, each valued by the max of its corners."""
    arr = _as_grid(image)
    shape = arr.shape
    d = arr.ndim
    cells_by_dim: List[List[Cell]] = [[] for _ in range(d + 1)]
    for extent in itertools.product((0, 1), repeat=d):
        dim = sum(extent)
        dirs = [a for a in range(d) if extent[a]]
        ranges = [range(shape[a] - extent[a]) for a in range(d)]
        for anchor in itertools.product(*ranges):
            corners = itertools.product(*(range(anchor[a], anchor[a] + extent[a] + 1)
                                          for a in range(d)))
            value = max(arr[c] for c in corners)
            boundary = []
            for idx, a in enumerate(dirs):
                sign = -1 if idx % 2 else 1
                sub = tuple(e if b != a else 0 for b, e in enumerate(extent))
                upper = tuple(x if b != a else x + 1 for b, x in enumerate(anchor))
                boundary.append((upper + sub, sign))
                boundary.append((anchor + sub, -sign))
            cells_by_dim[dim].append(Cell(dim, anchor + extent, float(value), boundary))
    while len(cells_by_dim) > 1 and not cells_by_dim[-1]:
        cells_by_dim.pop()
    return FilteredComplex(cells_by_dim, "cubical", {"shape": shape})


# -- Rips filtrations ---------------------------------------------------------


def _as_dist(points=None, dist=None) -> np.ndarray:
    if dist is None:
        if points is None:
            raise UsageError("need either points or a distance matrix")
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2:
            raise InputError(f"points must be a 2D array, got shape {pts.shape}")
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
    else:
        dist = np.asarray(dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError("distance matrix must be square")
        if not np.allclose(dist, dist.T):
            raise InputError("distance matrix must be symmetric")
        if np.any(np.diag(dist) != 0):
            raise InputError("distance matrix must have a zero diagonal")
    if dist.size and dist.min() < 0:
        raise InputError("distances must be non-negative")
    if not np.all(np.isfinite(dist)):
        raise InputError("distances must be finite")
    return dist


def enclosing_radius(dist) -> float:
    """min over points of the farthest distance to any other point."""
    d = _as_dist(dist=dist)
    if d.shape[0] == 0:
        raise UsageError("empty distance matrix")
    return float(d.max(axis=1).min())


def rips_filtration(points=None, r_max: Union[float, str] = math.inf,
                    max_dim: int = 1, dist=None) -> FilteredComplex:
    """All simplices of diameter <= r_max up to dimension max_dim + 1.

    Simplices one dimension above max_dim are included so that max_dim
    bars can die; reported dimensions are capped at max_dim.  r_max may be
    a number, math.inf, or ENCLOSING for the enclosing-radius truncation.
    """
    if max_dim < 0:
        raise UsageError("max_dim must be >= 0")
    d = _as_dist(points, dist)
    n = d.shape[0]
    if r_max == ENCLOSING:
        r_max = enclosing_radius(d)
    elif isinstance(r_max, str):
        raise UsageError(f"unknown radius string {r_max!r}")
    top = max_dim + 1

    cells_by_dim: List[List[Cell]] = [[] for _ in range(top + 1)]
    for i in range(n):
        cells_by_dim[0].append(Cell(0, (i,), 0.0, []))

    nbrs: List[List[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if d[i, j] <= r_max:
                nbrs[i].append(j)

    def boundary_of(key: Key) -> List[Tuple[Key, int]]:
        return [(key[:i] + key[i + 1:], (-1) ** i) for i in range(len(key))]

    frontier: List[Tuple[Key, float]] = []
    for i in range(n):
        for j in nbrs[i]:
            frontier.append(((i, j), float(d[i, j])))
    for key, diam in frontier:
        cells_by_dim[1].append(Cell(1, key, diam, boundary_of(key)))
    for dim in range(2, top + 1):
        grown: List[Tuple[Key, float]] = []
        for key, diam in frontier:
            common = set(nbrs[key[0]])
            for v in key[1:]:
                common &= set(nbrs[v])
            for w in sorted(common):
                if w <= key[-1]:
                    continue
                new_diam = max(diam, max(float(d[v, w]) for v in key))
                grown.append((key + (w,), new_diam))
        for key, diam in grown:
            cells_by_dim[dim].append(Cell(dim, key, diam, boundary_of(key)))
        frontier = grown
    return FilteredComplex(cells_by_dim, "rips", {"n_points": n}, report_dim=max_dim)


# -- filtration diffs ---------------------------------------------------------


@dataclass
class DimDiff:
    """Per-dimension diff data; coordinates are already reversed in
    cohomology mode."""

    n_old: int
    n_new: int
    perm: Permutation
    n_deleted: int
    insert_positions: List[int]
    insert_keys: List[Key]
    survivor_inversions: int
    n_survivors: int


class FiltrationDiff:
    """Everything needed to update decompositions from one filtration to
    another, organized per cell dimension with per-matrix views."""

    def __init__(self, mode: str, dims: List[DimDiff], old: FilteredComplex,
                 new: FilteredComplex, fld: PrimeField):
        self.mode = mode
        self.dims = dims
        self.old = old
        self.new = new
        self.field = fld

    @property
    def ndims(self) -> int:
        return len(self.dims)

    def _dim(self, q: int) -> DimDiff:
        if 0 <= q < len(self.dims):
            return self.dims[q]
        return DimDiff(0, 0, Permutation.identity(0), 0, [], [], 0, 0)

    def n_inserted(self) -> int:
        return sum(len(dd.insert_positions) for dd in self.dims)

    def n_deleted(self) -> int:
        return sum(dd.n_deleted for dd in self.dims)

    def add_fraction(self) -> float:
        total = self.old.total_cells()
        return self.n_inserted() / total if total else 0.0

    def del_fraction(self) -> float:
        total = self.old.total_cells()
        return self.n_deleted() / total if total else 0.0

    def normalized_kendall_tau(self) -> float:
        """Inversions of the survivor reorder, pooled over dimensions."""
        inv = sum(dd.survivor_inversions for dd in self.dims)
        pairs = sum(dd.n_survivors * (dd.n_survivors - 1) // 2 for dd in self.dims)
        return inv / pairs if pairs else 0.0

    def is_pure_permutation(self) -> bool:
        return self.n_inserted() == 0 and self.n_deleted() == 0

    def _insert_columns(self, q: int) -> List[SparseColumn]:
        """Boundary columns of inserted q-cells in the new row index space."""
        below = self.new.index[q - 1] if q >= 1 else {}
        cols = []
        p = self.field
        for key in self._dim(q).insert_keys:
            cell = self.new.cells_by_dim[q][self.new.index[q][key]]
            ent = sorted((below[fkey], p.normalize(coeff)) for fkey, coeff in cell.boundary)
            cols.append(SparseColumn([(i, v) for i, v in ent if v]))
        return cols

    def _insert_rows(self, q: int) -> List[SparseColumn]:
        """Coboundary rows of inserted (q+1)-cells over reversed q-columns."""
        rows = []
        n_q_new = self.new.n_cells(q)
        qindex = self.new.index[q] if q <= self.new.max_dim else {}
        p = self.field
        for key in self._dim(q + 1).insert_keys:
            cell = self.new.cells_by_dim[q + 1][self.new.index[q + 1][key]]
            ent = sorted((n_q_new - 1 - qindex[fkey], p.normalize(coeff))
                         for fkey, coeff in cell.boundary)
            rows.append(SparseColumn([(i, v) for i, v in ent if v]))
        return rows

    def matrix_diff(self, q: int) -> MatrixDiff:
        """The diff for the dimension-q matrix in this diff's mode."""
        if self.mode == "homology":
            rows = self._dim(q - 1) if q >= 1 else DimDiff(0, 0, Permutation.identity(0), 0, [], [], 0, 0)
            cols = self._dim(q)
            return MatrixDiff(Q_r=rows.perm, Q_c=cols.perm,
                              k_r=rows.n_deleted, k_c=cols.n_deleted,
                              ins_rows=rows.insert_positions,
                              ins_cols=cols.insert_positions,
                              new_cols=self._insert_columns(q))
        rows = self._dim(q + 1)
        cols = self._dim(q)
        return MatrixDiff(Q_r=rows.perm, Q_c=cols.perm,
                          k_r=rows.n_deleted, k_c=cols.n_deleted,
                          ins_rows=rows.insert_positions,
                          ins_cols=cols.insert_positions,
                          new_rows=self._insert_rows(q))


def _dim_diff_homology(old_cells: List[Cell], old_index: Dict[Key, int],
                       new_cells: List[Cell], new_index: Dict[Key, int]) -> DimDiff:
    n_old, n_new = len(old_cells), len(new_cells)
    survivors = []  # (new_pos, old_pos)
    deleted = []
    for old_pos, c in enumerate(old_cells):
        new_pos = new_index.get(c.key)
        if new_pos is None:
            deleted.append(old_pos)
        else:
            survivors.append((new_pos, old_pos))
    survivors.sort()
    image = [0] * n_old
    for rank, (_, old_pos) in enumerate(survivors):
        image[old_pos] = rank
    base = len(survivors)
    for off, old_pos in enumerate(deleted):
        image[old_pos] = base + off
    inserted = [(pos, c.key) for pos, c in enumerate(new_cells) if c.key not in old_index]
    inserted.sort()
    # inversions of survivor ranks listed in old order
    ranks_in_old_order = [image[old_pos] for _, old_pos in sorted(survivors, key=lambda t: t[1])]
    return DimDiff(n_old, n_new, Permutation._trusted(image), len(deleted),
                   [pos for pos, _ in inserted], [key for _, key in inserted],
                   _count_inversions(ranks_in_old_order), len(survivors))


def _dim_diff_cohomology(old_cells: List[Cell], old_index: Dict[Key, int],
                         new_cells: List[Cell], new_index: Dict[Key, int]) -> DimDiff:
    n_old, n_new = len(old_cells), len(new_cells)
    survivors = []  # (reversed_new_pos, reversed_old_pos)
    deleted = []
    for old_pos, c in enumerate(old_cells):
        rev_old = n_old - 1 - old_pos
        new_pos = new_index.get(c.key)
        if new_pos is None:
            deleted.append(rev_old)
        else:
            survivors.append((n_new - 1 - new_pos, rev_old))
    survivors.sort()
    deleted.sort()
    image = [0] * n_old
    for off, rev_old in enumerate(deleted):
        image[rev_old] = off
    base = len(deleted)
    for rank, (_, rev_old) in enumerate(survivors):
        image[rev_old] = base + rank
    inserted = [(n_new - 1 - pos, c.key) for pos, c in enumerate(new_cells)
                if c.key not in old_index]
    inserted.sort()
    ranks_in_old_order = [image[rev_old] for _, rev_old in sorted(survivors, key=lambda t: t[1])]
    return DimDiff(n_old, n_new, Permutation._trusted(image), len(deleted),
                   [pos for pos, _ in inserted], [key for _, key in inserted],
                   _count_inversions(ranks_in_old_order), len(survivors))


def diff_filtrations(old: FilteredComplex, new: FilteredComplex, mode: str = "homology",
                     fld: Optional[PrimeField] = None) -> FiltrationDiff:
    """Diff two filtrations over the same key space into update instructions.

    Survivors are ordered by the new filtration (reversed for cohomology);
    deleted cells are permuted to the trailing (leading) block, and inserted
    cells carry their final positions plus boundary content.
    """
    if mode not in ("homology", "cohomology"):
        raise UsageError(f"unknown mode {mode!r}")
    if old.key_signature() != new.key_signature():
        raise UsageError(
            f"incompatible key spaces: {old.key_signature()} vs {new.key_signature()}")
    if fld is None:
        fld = PrimeField(2)
    build = _dim_diff_homology if mode == "homology" else _dim_diff_cohomology
    dims = []
    for q in range(old.max_dim + 1):
        dims.append(build(old.cells_by_dim[q], old.index[q],
                          new.cells_by_dim[q], new.index[q]))
    # a surviving cell must keep all of its faces; anything else means the
    # two complexes do not actually share a key space
    for q in range(1, new.max_dim + 1):
        old_below = old.index[q - 1]
        for c in new.cells_by_dim[q]:
            if c.key in old.index[q]:
                for fkey, _ in c.boundary:
                    if fkey not in old_below:
                        raise UsageError(
                            f"surviving cell {c.key} lost face {fkey}; invalid diff")
    return FiltrationDiff(mode, dims, old, new, fld)
