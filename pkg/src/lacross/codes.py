"""Code constructions: La-cross hypergraph-product codes and Bacon-Shor grids.

A La-cross code is the hypergraph product of one classical seed code with
itself. The seed parity matrix comes from the polynomial 1 + x + x^k on a
length-n register with open boundaries: row i has ones at columns
{i, i+1, i+k}, for i < n-k, so nothing wraps around. Physical qubits live on
two square lattices: an n x n "main" lattice (one qubit per classical-bit
pair) and an r x r sublattice with r = n - k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVector, RowspaceReducer, kernel_basis, rank, row_reduce


@dataclass(frozen=True)
class CirculantSpec:
    """Seed choice for a La-cross code: register length n, crossing range k."""

    n: int
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("crossing range k must be >= 2 (k=1 collapses to a repetition chain)")
        if self.n <= self.k:
            raise ValueError("need n > k for a nonempty parity matrix")

    @property
    def r(self) -> int:
        return self.n - self.k


def circulant_parity_matrix(n: int, k: int) -> BitMatrix:
    """(n-k) x n parity matrix of the truncated circulant seed 1 + x + x^k."""
    spec = CirculantSpec(n, k)  # validates
    h = BitMatrix(spec.r, n)
    for i in range(spec.r):
        h.set(i, i)
        h.set(i, i + 1)
        h.set(i, i + k)
    return h


def hypergraph_product(h: BitMatrix) -> tuple[BitMatrix, BitMatrix]:
    """CSS pair (hx, hz) of the hypergraph product of h with itself.

    hx = [h (x) I_n | I_r (x) h^T], hz = [I_n (x) h | h^T (x) I_r], both
    r*n by (n^2 + r^2). Row (i, p) of hx has flat index i*n + p; row (c, d)
    of hz has flat index c*r + d.
    """
    dense = h.to_dense()
    r, n = dense.shape
    eye_n = np.eye(n, dtype=np.uint8)
    eye_r = np.eye(r, dtype=np.uint8)
    hx = np.hstack([np.kron(dense, eye_n), np.kron(eye_r, dense.T)])
    hz = np.hstack([np.kron(eye_n, dense), np.kron(dense.T, eye_r)])
    return BitMatrix.from_dense(hx), BitMatrix.from_dense(hz)


@dataclass(frozen=True)
class LaCrossLayout:
    """Flat-index bookkeeping for the two qubit lattices."""

    n: int
    k: int

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def num_qubits(self) -> int:
        return self.n * self.n + self.r * self.r

    def main_index(self, row: int, col: int) -> int:
        assert 0 <= row < self.n and 0 <= col < self.n
        return row * self.n + col

    def sub_index(self, row: int, col: int) -> int:
        assert 0 <= row < self.r and 0 <= col < self.r
        return self.n * self.n + row * self.r + col

    def coords(self, index: int) -> tuple[str, int, int]:
        nn = self.n * self.n
        if index < nn:
            return ("main", index // self.n, index % self.n)
        index -= nn
        return ("sub", index // self.r, index % self.r)

    def x_check_index(self, i: int, p: int) -> int:
        """Row of hx measuring the X stabilizer at (seed row i, main col p)."""
        return i * self.n + p

    def z_check_index(self, c: int, d: int) -> int:
        """Row of hz measuring the Z stabilizer at (main row c, seed row d)."""
        return c * self.r + d


@dataclass
class CssCode:
    """A CSS code given by its two parity matrices (rows = stabilizers)."""

    hx: BitMatrix
    hz: BitMatrix

    def __post_init__(self):
        assert self.hx.ncols == self.hz.ncols
        prod = self.hx.mul_mat(self.hz.transpose())
        if prod.words.any():
            raise ValueError("hx and hz do not commute: hx @ hz^T != 0")

    @property
    def num_qubits(self) -> int:
        return self.hx.ncols

    @property
    def num_logicals(self) -> int:
        return self.num_qubits - rank(self.hx) - rank(self.hz)


@dataclass
class LaCrossCode(CssCode):
    """La-cross code with its seed data and lattice layout attached.

    kernel holds the RREF-normalized basis of the seed's null space; its
    pivot columns form the information set used to anchor logical operators.
    """

    spec: CirculantSpec = None  # type: ignore[assignment]
    h_seed: BitMatrix = None  # type: ignore[assignment]
    kernel: BitMatrix = None  # type: ignore[assignment]
    kernel_pivots: list[int] = field(default_factory=list)
    layout: LaCrossLayout = None  # type: ignore[assignment]

    @property
    def distance(self) -> int:
        return code_distance(self, exhaustive_limit=0)


def build_lacross(n: int, k: int) -> LaCrossCode:
    spec = CirculantSpec(n, k)
    h = circulant_parity_matrix(n, k)
    hx, hz = hypergraph_product(h)
    ker_raw = kernel_basis(h)
    ker_rref, pivots = row_reduce(ker_raw)
    code = LaCrossCode(
        hx=hx,
        hz=hz,
        spec=spec,
        h_seed=h,
        kernel=ker_rref,
        kernel_pivots=pivots,
        layout=LaCrossLayout(n, k),
    )
    assert code.num_qubits == n * n + spec.r * spec.r
    assert code.num_logicals == k * k
    return code


def _kernel_weights(code: LaCrossCode) -> list[int]:
    """Weights of all nonzero seed-kernel elements (2^k - 1 of them)."""
    kdim = code.kernel.nrows
    weights = []
    for mask in range(1, 1 << kdim):
        v = BitVector(code.spec.n)
        for b in range(kdim):
            if (mask >> b) & 1:
                v.ixor(code.kernel.row(b))
        weights.append(v.weight())
    return weights


def _exhaustive_min_logical(hker: BitMatrix, hother: BitMatrix) -> int:
    """Exact min weight over ker(hker) \\ rowspace(hother), by span walk."""
    basis = kernel_basis(hker)
    dim = basis.nrows
    if dim > 24:
        raise ValueError("kernel too large for exhaustive distance enumeration")
    stab = RowspaceReducer(hother)
    cur = BitVector(basis.ncols)
    best = basis.ncols + 1
    # binary reflected Gray code: one basis-row XOR per step
    for step in range(1, 1 << dim):
        bit = (step & -step).bit_length() - 1
        cur.ixor(basis.row(bit))
        w = cur.weight()
        if w < best and not stab.contains(cur):
            best = w
    return best


def code_distance(code: LaCrossCode, exhaustive_limit: int = 30) -> int:
    """Code distance via the seed-kernel string search.

    Logical strings confined to one main-lattice row (or column) carry a
    seed-kernel pattern, so the minimum over nonzero kernel elements upper
    bounds the distance; for these open-boundary seeds it is the distance.
    Codes with at most exhaustive_limit qubits are cross-checked exactly by
    enumerating both kernels.
    """
    d_restricted = min(_kernel_weights(code))
    if code.num_qubits <= exhaustive_limit:
        dx = _exhaustive_min_logical(code.hz, code.hx)
        dz = _exhaustive_min_logical(code.hx, code.hz)
        d_exact = min(dx, dz)
        assert d_exact == d_restricted, (d_exact, d_restricted)
        return d_exact
    return d_restricted


@dataclass
class BaconShorCode:
    """d x d Bacon-Shor subsystem code, row-major qubit layout.

    gauge_z rows are horizontal ZZ pairs, indexed i*(d-1)+j for the pair
    (i,j)-(i,j+1); gauge_x rows are vertical XX pairs, indexed i*d+j for
    (i,j)-(i+1,j). Stabilizers are the usual two-row XX and two-column ZZ
    products. The logical X is the top row, the logical Z the left column.
    """

    d: int
    stabilizers_x: BitMatrix = None  # type: ignore[assignment]
    stabilizers_z: BitMatrix = None  # type: ignore[assignment]
    gauge_x: BitMatrix = None  # type: ignore[assignment]
    gauge_z: BitMatrix = None  # type: ignore[assignment]
    logical_x: BitVector = None  # type: ignore[assignment]
    logical_z: BitVector = None  # type: ignore[assignment]

    @property
    def num_qubits(self) -> int:
        return self.d * self.d

    def index(self, i: int, j: int) -> int:
        assert 0 <= i < self.d and 0 <= j < self.d
        return i * self.d + j

    def z_gauge_index(self, i: int, j: int) -> int:
        """Gauge row for the ZZ pair (i,j)-(i,j+1)."""
        assert 0 <= i < self.d and 0 <= j < self.d - 1
        return i * (self.d - 1) + j

    def x_gauge_index(self, i: int, j: int) -> int:
        """Gauge row for the XX pair (i,j)-(i+1,j)."""
        assert 0 <= i < self.d - 1 and 0 <= j < self.d
        return i * self.d + j


def build_bacon_shor(d: int) -> BaconShorCode:
    if d < 2:
        raise ValueError("need d >= 2")
    nq = d * d

    stabs_x = BitMatrix(d - 1, nq)
    for i in range(d - 1):
        for j in range(d):
            stabs_x.set(i, i * d + j)
            stabs_x.set(i, (i + 1) * d + j)

    stabs_z = BitMatrix(d - 1, nq)
    for j in range(d - 1):
        for i in range(d):
            stabs_z.set(j, i * d + j)
            stabs_z.set(j, i * d + j + 1)

    gauge_z = BitMatrix(d * (d - 1), nq)
    for i in range(d):
        for j in range(d - 1):
            g = i * (d - 1) + j
            gauge_z.set(g, i * d + j)
            gauge_z.set(g, i * d + j + 1)

    gauge_x = BitMatrix(d * (d - 1), nq)
    for i in range(d - 1):
        for j in range(d):
            g = i * d + j
            gauge_x.set(g, i * d + j)
            gauge_x.set(g, (i + 1) * d + j)

    logical_x = BitVector.from_support(nq, [j for j in range(d)])
    logical_z = BitVector.from_support(nq, [i * d for i in range(d)])

    return BaconShorCode(
        d=d,
        stabilizers_x=stabs_x,
        stabilizers_z=stabs_z,
        gauge_x=gauge_x,
        gauge_z=gauge_z,
        logical_x=logical_x,
        logical_z=logical_z,
    )
