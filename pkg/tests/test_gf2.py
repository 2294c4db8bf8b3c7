"""GF(2) linear algebra: packed ops against int/numpy reference oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacross.gf2 import (
    BitMatrix,
    BitVector,
    RowspaceReducer,
    in_image,
    kernel_basis,
    rank,
    row_reduce,
    solve,
)


def dense_rank(arr):
    """Reference rank via plain numpy elimination."""
    a = (np.array(arr, dtype=np.uint8) & 1).copy()
    r = 0
    for c in range(a.shape[1]):
        rows = np.nonzero(a[r:, c])[0]
        if rows.size == 0:
            continue
        a[[r, r + rows[0]]] = a[[r + rows[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == a.shape[0]:
            break
    return r


bit_rows = st.integers(1, 12)
bit_cols = st.integers(1, 130)  # crosses the 64- and 128-bit word boundaries


@st.composite
def dense_matrices(draw):
    r = draw(bit_rows)
    c = draw(bit_cols)
    data = draw(st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return np.array(data, dtype=np.uint8)


class TestBitVector:
    def test_roundtrip_support(self):
        v = BitVector.from_support(70, [0, 63, 64, 69])
        assert v.support() == [0, 63, 64, 69]
        assert v.weight() == 4
        assert v.get(63) == 1 and v.get(62) == 0

    def test_from_bits_roundtrip(self):
        bits = np.array([1, 0, 1, 1, 0, 0, 1], dtype=np.uint8)
        v = BitVector.from_bits(bits)
        assert np.array_equal(v.to_bits(), bits)

    def test_xor_and_dot(self):
        a = BitVector.from_support(10, [1, 3, 5])
        b = BitVector.from_support(10, [3, 5, 7])
        assert (a ^ b).support() == [1, 7]
        assert a.dot(b) == 0
        assert a.overlap(b) == 2

    def test_set_clear(self):
        v = BitVector(5)
        v.set(2)
        v.set(2, 0)
        assert v.is_zero()

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=200),
           st.lists(st.integers(0, 1), min_size=1, max_size=200))
    def test_xor_matches_int_oracle(self, abits, bbits):
        n = min(len(abits), len(bbits))
        abits, bbits = abits[:n], bbits[:n]
        a, b = BitVector.from_bits(abits), BitVector.from_bits(bbits)
        ia = int("".join(map(str, reversed(abits))), 2) if any(abits) else 0
        ib = int("".join(map(str, reversed(bbits))), 2) if any(bbits) else 0
        assert (a ^ b).weight() == bin(ia ^ ib).count("1")
        assert a.dot(b) == bin(ia & ib).count("1") % 2


class TestBitMatrix:
    def test_identity(self):
        m = BitMatrix.identity(65)
        assert rank(m) == 65
        assert np.array_equal(m.to_dense(), np.eye(65, dtype=np.uint8))

    def test_mul_vec(self):
        m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        v = BitVector.from_bits([1, 1, 1])
        assert m.mul_vec(v).to_bits().tolist() == [0, 0]
        v2 = BitVector.from_bits([1, 0, 0])
        assert m.mul_vec(v2).to_bits().tolist() == [1, 0]

    def test_mul_mat_matches_numpy(self):
        rng = np.random.default_rng(7)
        a = rng.integers(0, 2, size=(5, 9), dtype=np.uint8)
        b = rng.integers(0, 2, size=(9, 4), dtype=np.uint8)
        got = BitMatrix.from_dense(a).mul_mat(BitMatrix.from_dense(b)).to_dense()
        assert np.array_equal(got, (a @ b) % 2)

    def test_transpose(self):
        rng = np.random.default_rng(3)
        a = rng.integers(0, 2, size=(6, 70), dtype=np.uint8)
        assert np.array_equal(BitMatrix.from_dense(a).transpose().to_dense(), a.T)

    @given(dense_matrices())
    @settings(max_examples=60)
    def test_dense_roundtrip(self, arr):
        assert np.array_equal(BitMatrix.from_dense(arr).to_dense(), arr)


class TestElimination:
    def test_rank_small_known(self):
        m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        rref, pivots = row_reduce(m)
        assert rank(m) == 2
        assert pivots == [0, 1]

    def test_zero_and_empty(self):
        assert rank(BitMatrix.zeros(3, 5)) == 0
        assert kernel_basis(BitMatrix.zeros(2, 4)).nrows == 4

    def test_row_reduce_idempotent(self):
        rng = np.random.default_rng(11)
        m = BitMatrix.from_dense(rng.integers(0, 2, size=(8, 20), dtype=np.uint8))
        rref, pivots = row_reduce(m)
        rref2, pivots2 = row_reduce(rref)
        assert rref == rref2 and pivots == pivots2

    @given(dense_matrices())
    @settings(max_examples=60)
    def test_rank_matches_dense_oracle(self, arr):
        assert rank(BitMatrix.from_dense(arr)) == dense_rank(arr)

    @given(dense_matrices())
    @settings(max_examples=60)
    def test_rank_equals_transpose_rank(self, arr):
        m = BitMatrix.from_dense(arr)
        assert rank(m) == rank(m.transpose())

    @given(dense_matrices())
    @settings(max_examples=60)
    def test_kernel(self, arr):
        m = BitMatrix.from_dense(arr)
        ker = kernel_basis(m)
        assert ker.nrows == m.ncols - rank(m)
        for i in range(ker.nrows):
            assert m.mul_vec(ker.row(i)).is_zero()
        if ker.nrows:
            assert rank(ker) == ker.nrows

    @given(dense_matrices(), st.data())
    @settings(max_examples=60)
    def test_solve_recovers_image_vectors(self, arr, data):
        m = BitMatrix.from_dense(arr)
        xbits = data.draw(st.lists(st.integers(0, 1), min_size=m.ncols, max_size=m.ncols))
        y = m.mul_vec(BitVector.from_bits(xbits))
        x = solve(m, y)
        assert x is not None
        assert m.mul_vec(x) == y

    def test_solve_unsolvable(self):
        m = BitMatrix.from_dense([[1, 0], [1, 0]])
        y = BitVector.from_bits([1, 0])
        assert solve(m, y) is None

    def test_in_image(self):
        m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        assert in_image(m, BitVector.from_bits([1, 0, 1]))
        assert not in_image(m, BitVector.from_bits([1, 0, 0]))


class TestRowspaceReducer:
    @given(dense_matrices(), st.data())
    @settings(max_examples=60)
    def test_reduce_decomposition(self, arr, data):
        m = BitMatrix.from_dense(arr)
        red = RowspaceReducer(m)
        vbits = data.draw(st.lists(st.integers(0, 1), min_size=m.ncols, max_size=m.ncols))
        v = BitVector.from_bits(vbits)
        residual, combo = red.reduce(v)
        # v == combo @ M xor residual
        acc = residual.copy()
        for i in combo.support():
            acc.ixor(m.row(i))
        assert acc == v
        assert red.contains(v) == in_image(m, v)

    def test_residual_canonical(self):
        m = BitMatrix.from_dense([[1, 1, 0, 0], [0, 0, 1, 1]])
        red = RowspaceReducer(m)
        r1, _ = red.reduce(BitVector.from_bits([1, 0, 0, 0]))
        r2, _ = red.reduce(BitVector.from_bits([0, 1, 0, 0]))
        assert r1 == r2  # same coset -> same representative
