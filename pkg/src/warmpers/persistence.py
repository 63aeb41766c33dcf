"""User-facing persistence engine.

`compute_persistence` reduces a filtered complex and pairs cells into a
barcode; the returned DecompositionSet can then be pushed to a nearby
filtration with `update_persistence` at a fraction of the from-scratch
cost.  Also hosts the persistence loss used by the optimization demo and
its exact gradient for Rips filtrations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DegenerateGradientError, UsageError
from .field import PrimeField
from .filtration import FilteredComplex, diff_filtrations
from .reduction import OperationCounters, RUDecomposition, reduce_complex
from .update import general_update, general_update_cohomology


@dataclass(frozen=True)
class PersistencePair:
    """One bar: (dim, birth, death) plus the cell indices that created it."""

    dim: int
    birth: float
    death: float
    birth_index: int
    death_index: Optional[int]

    @property
    def finite(self) -> bool:
        return math.isfinite(self.death)

    @property
    def length(self) -> float:
        return self.death - self.birth

    def sort_key(self):
        return (self.dim, self.birth, self.death, self.birth_index,
                -1 if self.death_index is None else self.death_index)


@dataclass
class Barcode:
    """Multiset of persistence pairs; zero-length bars are retained here and
    filtered only at output time."""

    pairs: List[PersistencePair] = dc_field(default_factory=list)

    def sorted_pairs(self, include_zero: bool = True) -> List[PersistencePair]:
        sel = self.pairs if include_zero else [p for p in self.pairs if p.length != 0 or not p.finite]
        return sorted(sel, key=PersistencePair.sort_key)

    def in_dim(self, dim: int) -> List[PersistencePair]:
        return [p for p in self.pairs if p.dim == dim]

    def __eq__(self, other):
        return isinstance(other, Barcode) and self.sorted_pairs() == other.sorted_pairs()

    def __len__(self):
        return len(self.pairs)


def format_barcode(barcode: Barcode, include_zero: bool = False) -> str:
    """Text form: 'dim birth death birth_index death_index' per line, death
    'inf' and death index '-' for infinite bars, sorted by (dim, birth, death)."""
    lines = []
    for p in barcode.sorted_pairs(include_zero=include_zero):
        death = "inf" if not p.finite else repr(p.death)
        didx = "-" if p.death_index is None else str(p.death_index)
        lines.append(f"{p.dim} {p.birth!r} {death} {p.birth_index} {didx}")
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class DecompositionSet:
    """Per-dimension decompositions tied to the complex they factorize."""

    mode: str
    field: PrimeField
    complex: FilteredComplex
    decs: List[RUDecomposition]
    use_clearing: bool
    keep_basis: bool
    counters: OperationCounters = dc_field(default_factory=OperationCounters)

    def clone(self) -> "DecompositionSet":
        return DecompositionSet(self.mode, self.field, self.complex,
                                [d.clone() for d in self.decs],
                                self.use_clearing, self.keep_basis, self.counters.copy())

    def barcode(self) -> Barcode:
        if self.mode == "homology":
            return _barcode_homology(self.complex, self.decs)
        return _barcode_cohomology(self.complex, self.decs)


def _barcode_homology(cx: FilteredComplex, decs: List[RUDecomposition]) -> Barcode:
    r = cx.max_dim
    death_map: List[dict] = [dict() for _ in range(r + 1)]
    for q in range(r):
        for j, col in enumerate(decs[q + 1].R.columns):
            if col.entries:
                death_map[q][col.entries[-1][0]] = j
    pairs = []
    for q in range(min(cx.report_dim, r) + 1):
        vals = cx.values(q)
        vals_up = cx.values(q + 1) if q < r else []
        dm = death_map[q]
        for j, col in enumerate(decs[q].R.columns):
            if col.entries:
                continue
            dj = dm.get(j)
            if dj is None:
                pairs.append(PersistencePair(q, vals[j], math.inf, j, None))
            else:
                pairs.append(PersistencePair(q, vals[j], vals_up[dj], j, dj))
    return Barcode(pairs)


def _barcode_cohomology(cx: FilteredComplex, decs: List[RUDecomposition]) -> Barcode:
    r = cx.max_dim
    pivot_rows: List[set] = []
    for q in range(r + 1):
        pivot_rows.append({col.entries[-1][0] for col in decs[q].R.columns if col.entries})
    pairs = []
    for q in range(min(cx.report_dim, r) + 1):
        n_q = cx.n_cells(q)
        n_up = cx.n_cells(q + 1) if q < r else 0
        vals = cx.values(q)
        vals_up = cx.values(q + 1) if q < r else []
        cols = decs[q].R.columns
        for s in range(n_q):
            rev = n_q - 1 - s
            if q >= 1 and rev in pivot_rows[q - 1]:
                continue  # this cell is the death of a (q-1)-bar
            col = cols[rev]
            if col.entries:
                tau = n_up - 1 - col.entries[-1][0]
                pairs.append(PersistencePair(q, vals[s], vals_up[tau], s, tau))
            else:
                pairs.append(PersistencePair(q, vals[s], math.inf, s, None))
    return Barcode(pairs)


def compute_persistence(cx: FilteredComplex, mode: str = "homology",
                        use_clearing: bool = True, keep_basis: bool = True,
                        fld: Optional[PrimeField] = None,
                        counters: Optional[OperationCounters] = None,
                        validate_chain: bool = False) -> Tuple[DecompositionSet, Barcode]:
    """Reduce the complex from scratch and extract its barcode."""
    if fld is None:
        fld = PrimeField(2)
    local = OperationCounters()
    boundaries = cx.boundary_matrices(fld)
    decs = reduce_complex(boundaries, mode=mode, use_clearing=use_clearing,
                          keep_basis=keep_basis, counters=local,
                          validate_chain=validate_chain)
    state = DecompositionSet(mode, fld, cx, decs, use_clearing, keep_basis, local)
    if counters is not None:
        counters.add(local)
    return state, state.barcode()


def update_persistence(state: DecompositionSet, new_cx: FilteredComplex,
                       counters: Optional[OperationCounters] = None,
                       stage_hook=None, diff=None) -> Tuple[DecompositionSet, Barcode]:
    """Warm-start the decomposition of a nearby filtration.

    Dimensions are processed in the order that lets each reduced matrix
    clear the next one (decreasing for homology, increasing for cohomology).
    The input state is left usable.  Callers that already diffed the two
    filtrations (for reporting) can pass the diff to avoid recomputing it.
    """
    if not state.keep_basis:
        raise UsageError("update requires a state computed with keep_basis")
    if diff is None:
        diff = diff_filtrations(state.complex, new_cx, state.mode, state.field)
    elif (diff.mode != state.mode or diff.old is not state.complex
          or diff.new is not new_cx):
        raise UsageError("supplied diff does not match this state and filtration")
    local = OperationCounters()
    r = state.complex.max_dim
    new_decs: List[Optional[RUDecomposition]] = [None] * (r + 1)
    if state.mode == "homology":
        for q in range(r, -1, -1):
            clear_with = new_decs[q + 1].R if (state.use_clearing and q < r) else None
            new_decs[q] = general_update(state.decs[q], diff.matrix_diff(q), local,
                                         clear_with=clear_with, stage_hook=stage_hook)
    else:
        for q in range(r + 1):
            clear_with = new_decs[q - 1].R if (state.use_clearing and q > 0) else None
            new_decs[q] = general_update_cohomology(state.decs[q], diff.matrix_diff(q), local,
                                                    clear_with=clear_with, stage_hook=stage_hook)
    agg = state.counters.copy()
    agg.add(local)
    new_state = DecompositionSet(state.mode, state.field, new_cx,
                                 new_decs, state.use_clearing, state.keep_basis, agg)  # type: ignore[arg-type]
    if counters is not None:
        counters.add(local)
    return new_state, new_state.barcode()


# -- persistence loss and its Rips gradient -----------------------------------


def _loss_bars(barcode: Barcode, dim: int) -> List[PersistencePair]:
    bars = [p for p in barcode.in_dim(dim) if p.finite]
    bars.sort(key=lambda p: (-p.length, p.birth, p.death, p.birth_index))
    return bars


def persistence_loss(barcode: Barcode, p: float = 2.0, q: float = 0.0,
                     i0: int = 1, dim: int = 1) -> float:
    """Sum of |death-birth|^p * ((death+birth)/2)^q over the finite bars of
    the given dimension, starting from the i0-th longest bar (1-based)."""
    if i0 < 1:
        raise UsageError("i0 is 1-based and must be >= 1")
    total = 0.0
    for bar in _loss_bars(barcode, dim)[i0 - 1:]:
        total += abs(bar.death - bar.birth) ** p * ((bar.death + bar.birth) / 2.0) ** q
    return total


def _max_pair(key: Tuple[int, ...], dist: np.ndarray) -> Tuple[int, int]:
    """Vertex pair realizing the simplex diameter; lexicographic tie-break."""
    best = None
    best_d = -1.0
    for a in range(len(key)):
        for b in range(a + 1, len(key)):
            dab = dist[key[a], key[b]]
            if dab > best_d:
                best_d = dab
                best = (key[a], key[b])
    return best  # type: ignore[return-value]


def loss_gradient_rips(points, cx: FilteredComplex, barcode: Barcode,
                       p: float = 2.0, q: float = 0.0, i0: int = 1,
                       dim: int = 1) -> np.ndarray:
    """Gradient of persistence_loss with respect to the point coordinates.

    Each finite bar's birth and death values are simplex diameters, realized
    by one vertex pair each; the loss differentiates through those distances
    only.  A zero-distance contributing pair has no direction and raises.
    """
    pts = np.asarray(points, dtype=float)
    grad = np.zeros_like(pts)
    bars = _loss_bars(barcode, dim)[max(i0, 1) - 1:]
    if not bars:
        return grad
    diffs = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diffs * diffs).sum(axis=2))

    def accumulate(cell_dim: int, index: int, dvalue: float) -> None:
        if cell_dim == 0 or dvalue == 0.0:
            return  # vertices enter at value 0 regardless of position
        key = cx.cells_by_dim[cell_dim][index].key
        a, b = _max_pair(key, dist)
        d = dist[a, b]
        if d == 0.0:
            raise DegenerateGradientError(
                f"coincident points {a} and {b} on a contributing pair")
        direction = (pts[a] - pts[b]) / d
        grad[a] += dvalue * direction
        grad[b] -= dvalue * direction

    for bar in bars:
        gap = bar.death - bar.birth
        if gap == 0.0:
            continue
        mid = (bar.death + bar.birth) / 2.0
        d_len = p * abs(gap) ** (p - 1) * math.copysign(1.0, gap) * mid ** q
        d_mid = 0.0 if q == 0.0 else abs(gap) ** p * q * mid ** (q - 1) / 2.0
        accumulate(dim, bar.birth_index, -d_len + d_mid)
        accumulate(dim + 1, bar.death_index, d_len + d_mid)
    return grad
