"""Bit-packed linear algebra over GF(2).

Vectors and matrices store 64 bits per machine word (numpy uint64), so a
row operation on a length-10^4 vector is ~160 word XORs. Everything downstream
(code construction, logical-operator searches, the backward detector walk)
sits on these two types.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64


def _nwords(nbits: int) -> int:
    return max(1, (nbits + WORD - 1) // WORD)


def _tail_mask(nbits: int) -> np.uint64:
    """Mask of valid bits in the last word."""
    rem = nbits % WORD
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


class BitVector:
    """Mutable GF(2) vector of fixed length."""

    __slots__ = ("nbits", "words")

    def __init__(self, nbits: int, words: np.ndarray | None = None):
        self.nbits = nbits
        if words is None:
            self.words = np.zeros(_nwords(nbits), dtype=np.uint64)
        else:
            assert words.shape == (_nwords(nbits),)
            self.words = words

    @classmethod
    def from_support(cls, nbits: int, support: Iterable[int]) -> "BitVector":
        v = cls(nbits)
        for i in support:
            v.flip(i)
        return v

    @classmethod
    def from_bits(cls, bits: Sequence[int] | np.ndarray) -> "BitVector":
        arr = np.asarray(bits, dtype=np.uint8) & 1
        nbits = len(arr)
        v = cls(nbits)
        if nbits:
            padded = np.zeros(_nwords(nbits) * WORD, dtype=np.uint8)
            padded[:nbits] = arr
            v.words = np.packbits(padded, bitorder="little").view(np.uint64).copy()
        return v

    def copy(self) -> "BitVector":
        return BitVector(self.nbits, self.words.copy())

    def get(self, i: int) -> int:
        return int((self.words[i // WORD] >> np.uint64(i % WORD)) & np.uint64(1))

    def set(self, i: int, val: int = 1) -> None:
        if val & 1:
            self.words[i // WORD] |= np.uint64(1 << (i % WORD))
        else:
            self.words[i // WORD] &= ~np.uint64(1 << (i % WORD))

    def flip(self, i: int) -> None:
        self.words[i // WORD] ^= np.uint64(1 << (i % WORD))

    def ixor(self, other: "BitVector") -> "BitVector":
        self.words ^= other.words
        return self

    def __xor__(self, other: "BitVector") -> "BitVector":
        return BitVector(self.nbits, self.words ^ other.words)

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def overlap(self, other: "BitVector") -> int:
        return int(np.bitwise_count(self.words & other.words).sum())

    def dot(self, other: "BitVector") -> int:
        return self.overlap(other) & 1

    def support(self) -> list[int]:
        out: list[int] = []
        for w in np.nonzero(self.words)[0]:
            word = int(self.words[w])
            base = int(w) * WORD
            while word:
                low = word & -word
                out.append(base + low.bit_length() - 1)
                word ^= low
        return out

    def to_bits(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return bits[: self.nbits]

    def key(self) -> bytes:
        """Hashable snapshot (the vector itself is mutable)."""
        return self.words.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.nbits == other.nbits and bool(np.array_equal(self.words, other.words))

    def __repr__(self) -> str:
        return f"BitVector({self.nbits}, support={self.support()})"


class BitMatrix:
    """GF(2) matrix, one packed row per numpy row."""

    __slots__ = ("nrows", "ncols", "words")

    def __init__(self, nrows: int, ncols: int, words: np.ndarray | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if words is None:
            self.words = np.zeros((nrows, _nwords(ncols)), dtype=np.uint64)
        else:
            assert words.shape == (nrows, _nwords(ncols))
            self.words = words

    @classmethod
    def from_dense(cls, arr: np.ndarray | Sequence[Sequence[int]]) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(arr, dtype=np.uint8)) & 1
        nrows, ncols = dense.shape
        m = cls(nrows, ncols)
        if nrows and ncols:
            padded = np.zeros((nrows, _nwords(ncols) * WORD), dtype=np.uint8)
            padded[:, :ncols] = dense
            m.words = np.packbits(padded, axis=1, bitorder="little").view(np.uint64).copy()
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            if not rows:
                raise ValueError("need ncols for an empty row list")
            ncols = rows[0].nbits
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            assert r.nbits == ncols
            m.words[i] = r.words
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.words[i, i // WORD] = np.uint64(1 << (i % WORD))
        return m

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.nrows, self.ncols, self.words.copy())

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.words[i].copy())

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j // WORD] >> np.uint64(j % WORD)) & np.uint64(1))

    def set(self, i: int, j: int, val: int = 1) -> None:
        if val & 1:
            self.words[i, j // WORD] |= np.uint64(1 << (j % WORD))
        else:
            self.words[i, j // WORD] &= ~np.uint64(1 << (j % WORD))

    def mul_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product M @ v over GF(2), result length nrows."""
        assert v.nbits == self.ncols
        parities = np.bitwise_count(self.words & v.words[None, :]).sum(axis=1) & 1
        return BitVector.from_bits(parities.astype(np.uint8))

    def mul_mat(self, other: "BitMatrix") -> "BitMatrix":
        assert self.ncols == other.nrows
        ot = other.transpose()
        out = BitMatrix(self.nrows, other.ncols)
        for j in range(other.ncols):
            col = BitVector(other.nrows, ot.words[j].copy())
            prod = self.mul_vec(col)
            for i in prod.support():
                out.set(i, j)
        return out

    def transpose(self) -> "BitMatrix":
        dense = self.to_dense()
        return BitMatrix.from_dense(dense.T) if self.nrows and self.ncols else BitMatrix(self.ncols, self.nrows)

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        assert self.ncols == other.ncols
        return BitMatrix(self.nrows + other.nrows, self.ncols, np.vstack([self.words, other.words]))

    def to_dense(self) -> np.ndarray:
        if self.nrows == 0 or self.ncols == 0:
            return np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        bits = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.ncols]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.nrows == other.nrows
            and self.ncols == other.ncols
            and bool(np.array_equal(self.words, other.words))
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Full RREF: returns (reduced matrix, pivot column list).

    Pivot rows come first; entries above and below each pivot are cleared.
    """
    work = m.words.copy()
    nrows, ncols = m.nrows, m.ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w, b = c // WORD, np.uint64(c % WORD)
        col = (work[r:, w] >> b) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        colall = ((work[:, w] >> b) & np.uint64(1)).astype(bool)
        colall[r] = False
        work[colall] ^= work[r]
        pivots.append(c)
        r += 1
    return BitMatrix(nrows, ncols, work), pivots


def rank(m: BitMatrix) -> int:
    return len(row_reduce(m)[1])


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Rows form a basis of {x : M x = 0}; (ncols - rank) rows."""
    rref, pivots = row_reduce(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.ncols) if c not in pivot_set]
    out = BitMatrix(len(free), m.ncols)
    for i, f in enumerate(free):
        out.set(i, f)
        for prow, pcol in enumerate(pivots):
            if rref.get(prow, f):
                out.set(i, pcol)
    return out


def solve(m: BitMatrix, y: BitVector) -> BitVector | None:
    """One x with M x = y, or None when y is outside the column space."""
    assert y.nbits == m.nrows
    aug = BitMatrix(m.nrows, m.ncols + 1)
    aug.words[:, : m.words.shape[1]] = m.words
    # re-pack in case ncols is not a multiple of 64
    if m.ncols % WORD != 0:
        dense = np.zeros((m.nrows, m.ncols + 1), dtype=np.uint8)
        dense[:, : m.ncols] = m.to_dense()
        dense[:, m.ncols] = y.to_bits()
        aug = BitMatrix.from_dense(dense)
    else:
        for i in range(m.nrows):
            aug.set(i, m.ncols, y.get(i))
    rref, pivots = row_reduce(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = BitVector(m.ncols)
    for prow, pcol in enumerate(pivots):
        if rref.get(prow, m.ncols):
            x.set(pcol)
    return x


def in_image(m: BitMatrix, v: BitVector) -> bool:
    """True when v lies in the rowspace of M."""
    assert v.nbits == m.ncols
    stacked = m.vstack(BitMatrix.from_rows([v]))
    return rank(stacked) == rank(m)


class RowspaceReducer:
    """Pre-factored rowspace for repeated coset-reduction queries.

    reduce(v) returns (residual, combo) with v = combo @ M xor residual, the
    residual being the canonical coset representative (zero iff v is in the
    rowspace). combo indexes the ORIGINAL rows of M.
    """

    def __init__(self, m: BitMatrix):
        self.m = m
        aug = BitMatrix(m.nrows, m.ncols + m.nrows)
        dense = np.zeros((m.nrows, m.ncols + m.nrows), dtype=np.uint8)
        dense[:, : m.ncols] = m.to_dense()
        dense[:, m.ncols :] = np.eye(m.nrows, dtype=np.uint8)
        aug = BitMatrix.from_dense(dense) if m.nrows else aug
        # eliminate using only the first ncols columns for pivot selection
        work = aug.words
        pivots: list[int] = []
        r = 0
        for c in range(m.ncols):
            if r == m.nrows:
                break
            w, b = c // WORD, np.uint64(c % WORD)
            col = (work[r:, w] >> b) & np.uint64(1)
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                work[[r, p]] = work[[p, r]]
            colall = ((work[:, w] >> b) & np.uint64(1)).astype(bool)
            colall[r] = False
            work[colall] ^= work[r]
            pivots.append(c)
            r += 1
        self._aug = BitMatrix(m.nrows, m.ncols + m.nrows, work)
        self.pivots = pivots
        self.rank = len(pivots)

    def reduce(self, v: BitVector) -> tuple[BitVector, BitVector]:
        assert v.nbits == self.m.ncols
        res_dense = np.zeros(self._aug.ncols, dtype=np.uint8)
        res_dense[: v.nbits] = v.to_bits()
        cur = BitVector.from_bits(res_dense)
        for prow, pcol in enumerate(self.pivots):
            if cur.get(pcol):
                cur.ixor(self._aug.row(prow))
        bits = cur.to_bits()
        residual = BitVector.from_bits(bits[: self.m.ncols])
        combo = BitVector.from_bits(bits[self.m.ncols :])
        return residual, combo

    def contains(self, v: BitVector) -> bool:
        return self.reduce(v)[0].is_zero()
