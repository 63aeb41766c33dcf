import random

import numpy as np
import pytest

from warmpers import (ColumnMatrix, OperationCounters, RankDeficiencyError,
                      UsageError, apply_clearing, kendall_tau,
                      make_upper_triangular, matmul, reduce, reduce_complex,
                      reduce_rowwise, rips_filtration)
from warmpers.field import GF2, PrimeField

from helpers import (dense_matmul, is_upper_triangular, random_matrix,
                     random_permutation, random_points, random_upper_triangular,
                     to_dense)


def triangle_d1():
    # filtered triangle: vertices v0,v1,v2 then edges {v0,v1},{v0,v2},{v1,v2}
    return ColumnMatrix.from_entries(
        3, 3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1)], GF2)


def pivots(A):
    return [c.entries[-1][0] if c.entries else None for c in A.columns]


def test_reduce_already_reduced_is_noop():
    A = ColumnMatrix.from_entries(3, 2, [(0, 0, 1), (2, 1, 1)], GF2)
    counters = OperationCounters()
    before = A.copy()
    reduce(A, None, counters)
    assert A == before
    assert counters.column_additions == 0


def test_reduce_filtered_triangle():
    A = triangle_d1()
    V = ColumnMatrix.identity(3, GF2)
    reduce(A, V)
    assert pivots(A) == [1, 2, None]
    # the zero column signals a 1-dimensional birth; V stays upper triangular
    assert is_upper_triangular(to_dense(V))


def test_reduce_random_properties():
    rng = random.Random(11)
    for p in (2, 3):
        for _ in range(25):
            m, n = rng.randrange(1, 9), rng.randrange(1, 11)
            D = random_matrix(rng, m, n, p)
            orig = to_dense(D)
            A = D.copy()
            V = ColumnMatrix.identity(n, PrimeField(p))
            reduce(A, V)
            pv = [x for x in pivots(A) if x is not None]
            assert len(pv) == len(set(pv))
            dense_v = to_dense(V)
            assert is_upper_triangular(dense_v)
            assert all(dense_v[j, j] == 1 for j in range(n))
            assert np.array_equal(dense_matmul(orig, dense_v, p), to_dense(A))


def test_reduce_maintains_a_equals_cb():
    # if A = C*B on entry then the same holds on exit
    rng = random.Random(12)
    p = 3
    fld = PrimeField(p)
    C = random_matrix(rng, 6, 4, p)
    B = random_matrix(rng, 4, 5, p)
    A = matmul(C, B)
    reduce(A, B)
    assert np.array_equal(to_dense(A), dense_matmul(to_dense(C), to_dense(B), p))


def test_reduce_rowwise_examples():
    Z = ColumnMatrix.zeros(4, 3, GF2)
    reduce_rowwise(Z)
    assert Z.nnz == 0
    A1, A2 = triangle_d1(), triangle_d1()
    V1 = ColumnMatrix.identity(3, GF2)
    V2 = ColumnMatrix.identity(3, GF2)
    reduce(A1, V1)
    reduce_rowwise(A2, V2)
    assert A1 == A2 and V1 == V2


def test_identical_output_200_random():
    rng = random.Random(13)
    for trial in range(200):
        p = 2 if trial % 2 == 0 else 3
        m, n = rng.randrange(1, 11), rng.randrange(1, 11)
        D = random_matrix(rng, m, n, p, density=rng.uniform(0.1, 0.6))
        A1, A2 = D.copy(), D.copy()
        V1 = ColumnMatrix.identity(n, PrimeField(p))
        V2 = ColumnMatrix.identity(n, PrimeField(p))
        c1, c2 = OperationCounters(), OperationCounters()
        reduce(A1, V1, c1)
        reduce_rowwise(A2, V2, c2)
        assert A1 == A2
        assert V1 == V2
        assert c1.column_additions == c2.column_additions


def test_make_upper_triangular_examples():
    A = random_upper_triangular(random.Random(14), 5, 2)
    counters = OperationCounters()
    before = A.copy()
    make_upper_triangular(A, None, counters)
    assert A == before and counters.swaps == 0 and counters.pivot_eliminations == 0

    anti = ColumnMatrix.from_entries(2, 2, [(1, 0, 1), (0, 1, 1)], GF2)
    counters = OperationCounters()
    make_upper_triangular(anti, None, counters)
    assert to_dense(anti).tolist() == [[1, 0], [0, 1]]
    assert counters.swaps == 1


def test_make_upper_triangular_requires_square_invertible():
    with pytest.raises(UsageError):
        make_upper_triangular(ColumnMatrix.zeros(2, 3, GF2))
    singular = ColumnMatrix.from_entries(2, 2, [(0, 0, 1), (0, 1, 1)], GF2)
    with pytest.raises(RankDeficiencyError):
        make_upper_triangular(singular)


def test_make_upper_triangular_mirrors_and_factorizes():
    rng = random.Random(15)
    for p in (2, 3):
        for _ in range(20):
            n, m = rng.randrange(1, 9), rng.randrange(1, 7)
            V = random_upper_triangular(rng, n, p)
            R = random_matrix(rng, m, n, p)
            perm = random_permutation(rng, n)
            W = V.permute_rows(perm)
            dense_w, dense_r = to_dense(W), to_dense(R)
            make_upper_triangular(W, R)
            # both sides were hit by one invertible T: solve T from V side
            got_w, got_r = to_dense(W), to_dense(R)
            assert is_upper_triangular(got_w)
            assert all(got_w[j, j] % p for j in range(n))
            # T = W_in^{-1} W_out over Z/p, verified via R_out = R_in T
            # (avoid inverses: check column spans agree by re-deriving R_out)
            # instead assert rank/structure via the pivots being 0..n-1
            assert pivots(W) == list(range(n))
            # and the transformation is shared: W_in X = W_out and R_in X = R_out
            # have the same X because ops were mirrored; verify on stacked matrix
            stacked_in = np.vstack([dense_w, dense_r])
            stacked_out = np.vstack([got_w, got_r])
            # column ops act identically on stacked rows: reduce stacked_in with
            # the same recipe is equivalent to existence of X with in@X = out;
            # X exists iff solving in the field succeeds column by column
            assert _solvable(stacked_in, stacked_out, p)


def _solvable(A, B, p):
    """Does A X = B have a solution over Z/p? (A has full column rank here.)"""
    A = A.astype(np.int64) % p
    B = B.astype(np.int64) % p
    aug = np.hstack([A, B]) % p
    # row-reduce the augmented matrix; consistency check
    aug = aug.copy()
    rows, cols_a = aug.shape[0], A.shape[1]
    r = 0
    for c in range(cols_a):
        sel = None
        for i in range(r, rows):
            if aug[i, c] % p:
                sel = i
                break
        if sel is None:
            continue
        aug[[r, sel]] = aug[[sel, r]]
        inv = pow(int(aug[r, c]), p - 2, p)
        aug[r] = (aug[r] * inv) % p
        for i in range(rows):
            if i != r and aug[i, c] % p:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
        r += 1
    # rows of zeros in A-part must be zero in B-part
    for i in range(rows):
        if not aug[i, :cols_a].any() and aug[i, cols_a:].any():
            return False
    return True


def test_duplicate_pivot_bound():
    rng = random.Random(16)
    for _ in range(60):
        n = rng.randrange(2, 20)
        p = rng.choice([2, 3])
        V = random_upper_triangular(rng, n, p)
        perm = random_permutation(rng, n)
        W = V.permute_rows(perm)
        counters = OperationCounters()
        make_upper_triangular(W, None, counters)
        assert counters.pivot_eliminations <= kendall_tau(perm)


def test_apply_clearing_trivial_and_chain():
    rng = random.Random(17)
    R0 = random_matrix(rng, 4, 5, 2)
    V0 = ColumnMatrix.identity(5, GF2)
    R1, V1 = apply_clearing(R0, V0, ColumnMatrix.zeros(4, 3, GF2))
    assert R1 == R0 and V1 == V0

    # 3-level chain complexes from small Rips filtrations
    for seed in range(6):
        rng = random.Random(100 + seed)
        pts = random_points(rng, 7)
        cx = rips_filtration(pts, r_max=0.9, max_dim=1)
        for p in (2, 3):
            fld = PrimeField(p)
            D = cx.boundary_matrices(fld)
            if D[2].ncols == 0 or D[1].ncols == 0:
                continue
            R2 = D[2].copy()
            V2 = ColumnMatrix.identity(D[2].ncols, fld)
            reduce(R2, V2)
            R1c, V1c = apply_clearing(D[1].copy(), ColumnMatrix.identity(D[1].ncols, fld), R2)
            assert matmul(D[1], V1c) == R1c
            # cleared columns are zero exactly at the pivots of R2
            for colv in R2.columns:
                if colv.entries:
                    assert R1c.columns[colv.entries[-1][0]].is_zero()


def test_apply_clearing_out_of_range_pivot():
    R0 = ColumnMatrix.zeros(3, 2, GF2)
    V0 = ColumnMatrix.identity(2, GF2)
    bad_next = ColumnMatrix.from_entries(3, 1, [(2, 0, 1)], GF2)
    with pytest.raises(UsageError):
        apply_clearing(R0, V0, bad_next)


def test_reduce_complex_modes_and_clearing():
    rng = random.Random(18)
    pts = random_points(rng, 8)
    cx = rips_filtration(pts, r_max=1.1, max_dim=1)
    D = cx.boundary_matrices(GF2)
    for mode in ("homology", "cohomology"):
        plain = reduce_complex([m.copy() for m in D], mode=mode, use_clearing=False)
        cleared = reduce_complex([m.copy() for m in D], mode=mode, use_clearing=True)
        assert len(plain) == len(cleared) == len(D)
        for dec in plain + cleared:
            pv = [c.entries[-1][0] for c in dec.R.columns if c.entries]
            assert len(pv) == len(set(pv))
            assert dec.V is not None


def test_reduce_complex_counters_clearing_saves_work():
    rng = random.Random(19)
    pts = random_points(rng, 9)
    cx = rips_filtration(pts, r_max="enc", max_dim=1)
    D = cx.boundary_matrices(GF2)
    c_plain, c_clear = OperationCounters(), OperationCounters()
    reduce_complex([m.copy() for m in D], use_clearing=False, counters=c_plain)
    reduce_complex([m.copy() for m in D], use_clearing=True, counters=c_clear)
    assert c_clear.column_additions <= c_plain.column_additions


def test_no_basis_mode():
    A = triangle_d1()
    decs = reduce_complex([ColumnMatrix.zeros(0, 3, GF2), A], keep_basis=False)
    assert all(d.V is None for d in decs)
    pv = [c.entries[-1][0] for c in decs[1].R.columns if c.entries]
    assert len(pv) == len(set(pv))
