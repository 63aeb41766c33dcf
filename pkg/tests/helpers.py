"""Shared test oracles: dense mod-p linear algebra, a brute-force global
persistence computation, and random input generators.  Everything here is
deliberately independent of the package's sparse kernels."""

import math
import random

import numpy as np

from warmpers import Barcode, ColumnMatrix, PersistencePair
from warmpers.field import PrimeField


def to_dense(A: ColumnMatrix) -> np.ndarray:
    return np.array(A.to_dense(), dtype=np.int64).reshape(A.nrows, A.ncols)


def dense_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    return (A.astype(np.int64) @ B.astype(np.int64)) % p


def dense_equal(A: ColumnMatrix, M: np.ndarray) -> bool:
    return np.array_equal(to_dense(A), np.asarray(M) % A.field.p)


def is_upper_triangular(M: np.ndarray) -> bool:
    return np.array_equal(M, np.triu(M))


def dv_equals_r(D: np.ndarray, V: ColumnMatrix, R: ColumnMatrix, p: int) -> bool:
    return np.array_equal(dense_matmul(np.asarray(D) % p, to_dense(V), p), to_dense(R))


def random_matrix(rng: random.Random, m: int, n: int, p: int, density: float = 0.35) -> ColumnMatrix:
    fld = PrimeField(p)
    triples = []
    for j in range(n):
        for i in range(m):
            if rng.random() < density:
                triples.append((i, j, rng.randrange(1, p)))
    return ColumnMatrix.from_entries(m, n, triples, fld)


def random_upper_triangular(rng: random.Random, n: int, p: int, density: float = 0.3) -> ColumnMatrix:
    fld = PrimeField(p)
    triples = []
    for j in range(n):
        triples.append((j, j, rng.randrange(1, p)))
        for i in range(j):
            if rng.random() < density:
                triples.append((i, j, rng.randrange(1, p)))
    return ColumnMatrix.from_entries(n, n, triples, fld)


def random_permutation(rng: random.Random, n: int):
    from warmpers import Permutation
    image = list(range(n))
    rng.shuffle(image)
    return Permutation(image)


def inversions_quadratic(image) -> int:
    n = len(image)
    return sum(1 for i in range(n) for j in range(i + 1, n) if image[i] > image[j])


def brute_barcode(cx, p: int = 2) -> Barcode:
    """Global-matrix persistence, reduced densely: the independent oracle.

    Cells of every dimension are merged into one (value, dim, key) order and
    the full boundary matrix is reduced with plain lists; pairs are then
    mapped back to per-dimension indices.
    """
    order = []
    for q, cells in enumerate(cx.cells_by_dim):
        for k, c in enumerate(cells):
            order.append((c.value, c.dim, c.key, k, c))
    order.sort(key=lambda t: (t[0], t[1], t[2]))
    N = len(order)
    gidx = {(c.dim, c.key): g for g, (_, _, _, _, c) in enumerate(order)}
    cols = []
    for _, _, _, _, c in order:
        col = {}
        for fkey, coeff in c.boundary:
            col[gidx[(c.dim - 1, fkey)]] = coeff % p
        cols.append({i: v for i, v in col.items() if v})
    inv = [0] * p
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    lows = {}
    for j in range(N):
        col = cols[j]
        while col:
            low = max(col)
            owner = lows.get(low)
            if owner is None:
                break
            alpha = (-col[low] * inv[cols[owner][low]]) % p
            for i, v in cols[owner].items():
                nv = (col.get(i, 0) + alpha * v) % p
                if nv:
                    col[i] = nv
                elif i in col:
                    del col[i]
        if col:
            lows[max(col)] = j
    pairs = []
    death_of = {}
    for low, j in lows.items():
        death_of[low] = j
    for g, (_, _, _, k, c) in enumerate(order):
        if cols[g]:
            continue  # this cell is a death, recorded at its birth partner
        if c.dim > cx.report_dim:
            continue
        dg = death_of.get(g)
        if dg is None:
            pairs.append(PersistencePair(c.dim, c.value, math.inf, k, None))
        else:
            dcell = order[dg][4]
            pairs.append(PersistencePair(c.dim, c.value, dcell.value, k, order[dg][3]))
    return Barcode(pairs)


def random_points(rng: random.Random, n: int, dim: int = 2, scale: float = 1.0) -> np.ndarray:
    return np.array([[rng.uniform(0, scale) for _ in range(dim)] for _ in range(n)])


def random_image(rng: random.Random, rows: int, cols: int) -> np.ndarray:
    return np.array([[rng.random() for _ in range(cols)] for _ in range(rows)])


def stage_boundaries(old_cx, new_cx, mode: str, q: int, p: int):
    """Dense expected boundary at each update stage of the dimension-q matrix."""
    from warmpers import diff_filtrations
    fld = PrimeField(p)
    D_old = old_cx.boundary_matrices(fld)
    D_new = new_cx.boundary_matrices(fld)
    diff = diff_filtrations(old_cx, new_cx, mode, fld)
    md = diff.matrix_diff(q)
    if mode == "homology":
        m_old = D_old[q]
        m_new = D_new[q]
    else:
        r_old = old_cx.max_dim
        r_new = new_cx.max_dim
        m_old = (D_old[q + 1].anti_transpose() if q < r_old
                 else ColumnMatrix.zeros(0, old_cx.n_cells(q), fld))
        m_new = (D_new[q + 1].anti_transpose() if q < r_new
                 else ColumnMatrix.zeros(0, new_cx.n_cells(q), fld))
    permuted = m_old.permute_rows(md.Q_r).permute_cols(md.Q_c)
    if mode == "homology":
        deleted = permuted.delete_trailing(md.k_r, md.k_c)
    else:
        deleted = permuted.delete_leading(md.k_r, md.k_c)
    return {
        "permuted": to_dense(permuted),
        "triangularized": to_dense(permuted),
        "deleted": to_dense(deleted),
        "inserted": to_dense(m_new),
        "cleared": to_dense(m_new),
        "reduced": to_dense(m_new),
    }


def make_stage_checker(expected: dict, p: int, log=None):
    """A stage hook asserting dense(D) @ dense(V) == dense(R) at every stage,
    plus upper-triangularity of V with a nonzero diagonal once repaired."""
    def hook(stage, R, V):
        D = expected[stage]
        assert dv_equals_r(D, V, R, p), f"D*V != R after stage {stage!r}"
        if stage != "permuted":
            dense_v = to_dense(V)
            assert is_upper_triangular(dense_v), f"V not triangular after {stage!r}"
            assert all(dense_v[j, j] % p for j in range(V.ncols))
        if log is not None:
            log.append(stage)
    return hook
