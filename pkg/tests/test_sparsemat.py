import random

import numpy as np
import pytest

from warmpers import (ColumnMatrix, Permutation, SparseColumn, StructuralError,
                      UsageError, axpy, dump_triples, kendall_tau, matmul,
                      normalized_kendall_tau, pivot, row_times_matrix)
from warmpers.field import GF2, PrimeField

from helpers import (dense_matmul, inversions_quadratic, random_matrix,
                     random_permutation, to_dense)

GF3 = PrimeField(3)


def col(entries):
    return SparseColumn(list(entries))


# -- pivot / axpy --------------------------------------------------------------

def test_pivot_examples():
    assert pivot(col([])) is None
    assert pivot(col([(0, 1)])) == 0
    assert pivot(col([(1, 1), (4, 1), (7, 1)])) == 7


def test_axpy_examples():
    assert axpy(col([(2, 1)]), 1, col([(2, 1)]), GF2).entries == []
    assert axpy(col([(0, 1), (3, 1)]), 1, col([(1, 1), (3, 1)]), GF2).entries == [(0, 1), (1, 1)]
    # over Z/3: [(0,1)] + 2*[(0,2),(1,1)] = [(0,1+4),(1,2)] = [(0,2),(1,2)]
    assert axpy(col([(0, 1)]), 2, col([(0, 2), (1, 1)]), GF3).entries == [(0, 2), (1, 2)]


def test_axpy_matches_dense_oracle():
    rng = random.Random(7)
    for p in (2, 3, 5):
        fld = PrimeField(p)
        for _ in range(80):
            m = rng.randrange(1, 9)
            A = random_matrix(rng, m, 2, p, density=0.5)
            alpha = rng.randrange(p)
            got = axpy(A.columns[0], alpha, A.columns[1], fld)
            dense = to_dense(A)
            expect = (dense[:, 0] + alpha * dense[:, 1]) % p
            out = np.zeros(m, dtype=np.int64)
            for i, v in got.entries:
                out[i] = v
            assert np.array_equal(out, expect)
            rows = [i for i, _ in got.entries]
            assert rows == sorted(set(rows))
            assert all(v % p for _, v in got.entries)


# -- permutations --------------------------------------------------------------

def test_permutation_validation():
    with pytest.raises(UsageError):
        Permutation([0, 0, 1])
    with pytest.raises(UsageError):
        Permutation([0, 2])


def test_permute_rows_examples():
    A = ColumnMatrix.from_entries(2, 1, [(0, 0, 1)], GF2)
    assert A.permute_rows(Permutation([0, 1])) == A
    flipped = A.permute_rows(Permutation([1, 0]))
    assert flipped.columns[0].entries == [(1, 1)]
    B = ColumnMatrix.from_entries(3, 1, [(0, 0, 1), (1, 0, 1)], GF2)
    moved = B.permute_rows(Permutation([2, 0, 1]))
    assert moved.columns[0].entries == [(0, 1), (2, 1)]


def test_permute_rows_dense_oracle_and_inverse():
    rng = random.Random(21)
    for p in (2, 3):
        for _ in range(40):
            m, n = rng.randrange(1, 9), rng.randrange(1, 9)
            A = random_matrix(rng, m, n, p)
            perm = random_permutation(rng, m)
            got = A.permute_rows(perm)
            dense = np.zeros((m, n), dtype=np.int64)
            src = to_dense(A)
            for i in range(m):
                dense[perm(i)] = src[i]
            assert np.array_equal(to_dense(got), dense)
            assert got.permute_rows(perm.inverse()) == A
            assert got.nnz == A.nnz


def test_permute_cols_dense_oracle():
    rng = random.Random(22)
    A = random_matrix(rng, 5, 4, 3)
    perm = Permutation([2, 0, 3, 1])
    got = A.permute_cols(perm)
    src = to_dense(A)
    dense = np.zeros_like(src)
    for j in range(4):
        dense[:, perm(j)] = src[:, j]
    assert np.array_equal(to_dense(got), dense)
    # involution example: one swap applied twice
    swap = Permutation([1, 0, 2, 3])
    assert A.permute_cols(swap).permute_cols(swap) == A
    assert A.permute_cols(Permutation.identity(4)) == A


def test_permute_cols_shares_handles():
    rng = random.Random(23)
    A = random_matrix(rng, 4, 4, 2)
    got = A.permute_cols(Permutation([3, 2, 1, 0]))
    assert got.columns[3] is A.columns[0]


# -- delete / insert -----------------------------------------------------------

def test_delete_trailing_examples():
    A = ColumnMatrix.identity(3, GF2)
    assert A.delete_trailing(0, 0) == A
    cut = A.delete_trailing(1, 1)
    assert (cut.nrows, cut.ncols) == (2, 2)
    assert to_dense(cut).tolist() == [[1, 0], [0, 1]]


def test_delete_trailing_dense_oracle():
    rng = random.Random(31)
    from helpers import random_upper_triangular
    A = random_upper_triangular(rng, 6, 3)
    cut = A.delete_trailing(2, 2)
    assert np.array_equal(to_dense(cut), to_dense(A)[:4, :4])


def test_delete_trailing_zero_block_violation():
    A = ColumnMatrix.from_entries(3, 3, [(2, 0, 1)], GF2)
    with pytest.raises(StructuralError):
        A.delete_trailing(1, 1)


def test_delete_leading():
    A = ColumnMatrix.from_entries(3, 3, [(1, 1, 1), (2, 2, 1), (1, 2, 1)], GF2)
    assert A.delete_leading(0, 0) == A
    cut = A.delete_leading(1, 1)
    assert (cut.nrows, cut.ncols) == (2, 2)
    assert np.array_equal(to_dense(cut), to_dense(A)[1:, 1:])


def test_delete_leading_checks_deleted_columns():
    # entry in a deleted column below the deleted rows corrupts the block
    A = ColumnMatrix.from_entries(3, 3, [(2, 0, 1)], GF2)
    with pytest.raises(StructuralError):
        A.delete_leading(1, 1)
    # entries of surviving columns in deleted rows belong to the discarded
    # band and are dropped silently
    B = ColumnMatrix.from_entries(3, 3, [(0, 1, 1), (2, 1, 1)], GF2)
    cut = B.delete_leading(1, 1)
    assert np.array_equal(to_dense(cut), to_dense(B)[1:, 1:])


def test_insert_rows_examples():
    A = ColumnMatrix.from_entries(1, 1, [(0, 0, 1)], GF2)
    assert A.insert_rows([]) == A
    grown = A.insert_rows([0])
    assert grown.columns[0].entries == [(1, 1)]
    rng = random.Random(41)
    B = random_matrix(rng, 4, 3, 3)
    grown = B.insert_rows([1, 4, 5])
    dense = to_dense(B)
    expect = np.zeros((7, 3), dtype=np.int64)
    expect[[0, 2, 3, 6], :] = dense
    assert np.array_equal(to_dense(grown), expect)


def test_insert_rows_bad_positions():
    A = ColumnMatrix.zeros(2, 2, GF2)
    with pytest.raises(UsageError):
        A.insert_rows([1, 1])
    with pytest.raises(UsageError):
        A.insert_rows([5])


def test_insert_cols_examples():
    rng = random.Random(42)
    A = random_matrix(rng, 4, 3, 2)
    assert A.insert_cols([], []) == A
    tail = SparseColumn([(2, 1)])
    grown = A.insert_cols([3], [tail])
    assert grown.ncols == 4 and grown.columns[3] is tail
    c1, c2 = SparseColumn([(0, 1)]), SparseColumn([(3, 1)])
    grown = A.insert_cols([1, 3], [c1, c2])
    dense = to_dense(A)
    expect = np.zeros((4, 5), dtype=np.int64)
    expect[:, [0, 2, 4]] = dense
    expect[0, 1] = 1
    expect[3, 3] = 1
    assert np.array_equal(to_dense(grown), expect)


def test_insert_cols_row_range_checked():
    A = ColumnMatrix.zeros(2, 1, GF2)
    with pytest.raises(UsageError):
        A.insert_cols([0], [SparseColumn([(5, 1)])])


# -- anti-transpose / row products / kendall ------------------------------------

def test_anti_transpose():
    single = ColumnMatrix.from_entries(1, 1, [(0, 0, 1)], GF3)
    assert single.anti_transpose() == single
    rng = random.Random(51)
    A = random_matrix(rng, 2, 3, 3)
    got = A.anti_transpose()
    dense = to_dense(A)
    J_m = np.fliplr(np.eye(2, dtype=np.int64))
    J_n = np.fliplr(np.eye(3, dtype=np.int64))
    expect = (J_n @ dense.T @ J_m) % 3
    assert np.array_equal(to_dense(got), expect)
    assert got.anti_transpose() == A


def test_row_times_matrix():
    rng = random.Random(52)
    V = random_matrix(rng, 5, 5, 2)
    assert row_times_matrix(SparseColumn(), V).entries == []
    I = ColumnMatrix.identity(5, GF2)
    r = SparseColumn([(1, 1), (3, 1)])
    assert row_times_matrix(r, I).entries == [(1, 1), (3, 1)]
    got = row_times_matrix(r, V)
    vec = np.zeros(5, dtype=np.int64)
    for i, v in r.entries:
        vec[i] = v
    expect = (vec @ to_dense(V)) % 2
    out = np.zeros(5, dtype=np.int64)
    for i, v in got.entries:
        out[i] = v
    assert np.array_equal(out, expect)


def test_kendall_tau():
    assert kendall_tau(Permutation.identity(10)) == 0
    assert kendall_tau(Permutation([3, 2, 1, 0])) == 6
    rng = random.Random(53)
    for _ in range(30):
        perm = random_permutation(rng, rng.randrange(1, 9))
        assert kendall_tau(perm) == inversions_quadratic(perm.image)
    assert normalized_kendall_tau(Permutation([1, 0])) == 1.0
    assert normalized_kendall_tau(Permutation.identity(1)) == 0.0


# -- bookkeeping ---------------------------------------------------------------

def test_nnz_tracking_and_invariants():
    rng = random.Random(61)
    for p in (2, 3):
        fld = PrimeField(p)
        A = random_matrix(rng, 8, 8, p)
        ops = [
            A.permute_rows(random_permutation(rng, 8)),
            A.permute_cols(random_permutation(rng, 8)),
            A.insert_rows([0, 5]),
            A.insert_cols([8], [SparseColumn([(1, 1)])]),
            A.anti_transpose(),
        ]
        for out in ops:
            assert out.nnz == sum(len(c.entries) for c in out.columns)
            for c in out.columns:
                rows = [i for i, _ in c.entries]
                assert rows == sorted(set(rows))
                assert all(0 <= i < out.nrows for i in rows)
                assert all(0 < v < p for _, v in c.entries)


def test_matmul_against_dense():
    rng = random.Random(62)
    for p in (2, 3):
        A = random_matrix(rng, 5, 4, p)
        B = random_matrix(rng, 4, 6, p)
        assert np.array_equal(to_dense(matmul(A, B)),
                              dense_matmul(to_dense(A), to_dense(B), p))


def test_dump_triples():
    A = ColumnMatrix.from_entries(2, 2, [(1, 0, 1), (0, 1, 1)], GF2)
    assert dump_triples(A) == "0 1 1\n1 0 1"
