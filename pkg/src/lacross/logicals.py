"""Logical operators of La-cross codes and their disjoint representatives.

Logical X operators are strings along one main-lattice row carrying a
seed-kernel pattern; logical Z operators are the same along a column. With
the kernel basis in RREF, pattern b has a lone 1 at pivot column c_b, so
anchoring X strings at rows {c_a} and Z strings at columns {c_b} makes the
symplectic pairing exactly diagonal.

Teleported gates need several representatives of one logical that act on
pairwise disjoint qubits. Multiplying a representative by stabilizers moves
it between rows; a "macro stabilizer" (all X checks of one check-row, summed
against a kernel pattern) has no sublattice support and relates the strings
on rows i, i+1, i+k. The partition search enumerates every coset element
confined to few rows and picks a disjoint family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .codes import LaCrossCode
from .gf2 import BitVector, RowspaceReducer


class PartitionError(Exception):
    """No disjoint representative family exists within the span bound."""


@dataclass
class LogicalPair:
    """Anticommuting logical X/Z pair with its lattice anchors."""

    a: int
    b: int
    x: BitVector
    z: BitVector
    x_row: int
    z_col: int
    x_pattern: BitVector
    z_pattern: BitVector

    @property
    def x_length(self) -> int:
        return self.x_pattern.weight()

    @property
    def z_length(self) -> int:
        return self.z_pattern.weight()


@dataclass
class MacroStabilizer:
    """Sum of same-type checks along one check row, weighted by a pattern.

    For kind "X" and anchor i, this is sum_p pattern[p] * hx_row(i, p); the
    sublattice parts cancel whenever pattern is in the seed kernel, leaving
    row strings on rows {i, i+1, i+k}.
    """

    kind: str
    anchor: int
    pattern: BitVector
    op: BitVector
    check_rows: list[int]


@dataclass
class RepresentativePartition:
    """Pairwise-disjoint coset representatives of one logical operator."""

    kind: str
    a: int
    b: int
    canonical: BitVector
    reps: list[BitVector]
    spans: list[list[int]]


def _row_string(code: LaCrossCode, row: int, pattern: BitVector) -> BitVector:
    op = BitVector(code.num_qubits)
    for j in pattern.support():
        op.set(code.layout.main_index(row, j))
    return op


def _col_string(code: LaCrossCode, col: int, pattern: BitVector) -> BitVector:
    op = BitVector(code.num_qubits)
    for i in pattern.support():
        op.set(code.layout.main_index(i, col))
    return op


def logical_basis(code: LaCrossCode) -> list[LogicalPair]:
    """All k^2 logical pairs, ordered lexicographically by (a, b)."""
    kdim = code.kernel.nrows
    pivots = code.kernel_pivots
    assert len(pivots) == kdim
    pairs = []
    for a in range(kdim):
        for b in range(kdim):
            xop = _row_string(code, pivots[a], code.kernel.row(b))
            zop = _col_string(code, pivots[b], code.kernel.row(a))
            pairs.append(
                LogicalPair(
                    a=a,
                    b=b,
                    x=xop,
                    z=zop,
                    x_row=pivots[a],
                    z_col=pivots[b],
                    x_pattern=code.kernel.row(b),
                    z_pattern=code.kernel.row(a),
                )
            )
    for p in pairs:
        assert code.hz.mul_vec(p.x).is_zero()
        assert code.hx.mul_vec(p.z).is_zero()
    for p in pairs:
        for q in pairs:
            want = 1 if (p.a, p.b) == (q.a, q.b) else 0
            assert p.x.dot(q.z) == want
    return pairs


def macro_stabilizer(code: LaCrossCode, kind: str, anchor: int, pattern: BitVector) -> MacroStabilizer:
    """Pattern-weighted sum of the checks anchored at one check row/column."""
    assert kind in ("X", "Z")
    assert 0 <= anchor < code.spec.r
    assert code.h_seed.mul_vec(pattern).is_zero(), "pattern must lie in the seed kernel"
    op = BitVector(code.num_qubits)
    rows = []
    lay = code.layout
    for p in pattern.support():
        idx = lay.x_check_index(anchor, p) if kind == "X" else lay.z_check_index(p, anchor)
        rows.append(idx)
        op.ixor((code.hx if kind == "X" else code.hz).row(idx))
    macro = MacroStabilizer(kind=kind, anchor=anchor, pattern=pattern, op=op, check_rows=rows)
    # sublattice support must have cancelled
    main = code.layout.n ** 2
    assert all(q < main for q in op.support())
    return macro


def translate_representative(
    code: LaCrossCode, op: BitVector, kind: str, pattern: BitVector, anchors: list[int]
) -> BitVector:
    """Multiply op by the macro stabilizers at the given anchors."""
    out = op.copy()
    for i in anchors:
        out.ixor(macro_stabilizer(code, kind, i, pattern).op)
    return out


def _op_span(code: LaCrossCode, kind: str, op: BitVector) -> list[int]:
    """Distinct main rows (X) or columns (Z) touched by op."""
    lines = set()
    for q in op.support():
        where, r, c = code.layout.coords(q)
        assert where == "main"
        lines.add(r if kind == "X" else c)
    return sorted(lines)


def _coset_candidates(
    code: LaCrossCode, kind: str, canonical: BitVector, reducer: RowspaceReducer, max_span: int
) -> list[BitVector]:
    """Every main-lattice coset element of canonical spanning <= max_span lines.

    A main-only element confined to a set of rows (X kind; columns for Z)
    must carry a seed-kernel pattern on each line, so enumerating lines x
    nonzero patterns and testing coset membership is exhaustive.
    """
    n = code.spec.n
    kdim = code.kernel.nrows
    patterns = []
    for mask in range(1, 1 << kdim):
        v = BitVector(n)
        for b in range(kdim):
            if (mask >> b) & 1:
                v.ixor(code.kernel.row(b))
        patterns.append(v)
    string = _row_string if kind == "X" else _col_string

    out = []
    for span in range(1, max_span + 1):
        if len(patterns) ** span * len(list(itertools.combinations(range(n), span))) > 500_000:
            break
        for lines in itertools.combinations(range(n), span):
            for sigmas in itertools.product(patterns, repeat=span):
                op = BitVector(code.num_qubits)
                for line, sigma in zip(lines, sigmas):
                    op.ixor(string(code, line, sigma))
                if reducer.contains(op ^ canonical):
                    out.append(op)
    return out


def representative_partition(
    code: LaCrossCode, pair: LogicalPair, kind: str, count: int | None = None
) -> RepresentativePartition:
    """Find `count` pairwise-disjoint representatives of one logical.

    Defaults to one representative per qubit of the canonical string.
    Raises PartitionError when no disjoint family exists.
    """
    assert kind in ("X", "Z")
    canonical = pair.x if kind == "X" else pair.z
    if count is None:
        count = canonical.weight()
    stab = code.hx if kind == "X" else code.hz
    reducer = RowspaceReducer(stab)
    max_span = max(2, code.spec.k - 1)
    candidates = _coset_candidates(code, kind, canonical, reducer, max_span)
    candidates.sort(key=lambda op: (op.weight(), _op_span(code, kind, op), op.support()))

    supports = [frozenset(op.support()) for op in candidates]
    chosen: list[int] = []

    def dfs(start: int, used: frozenset) -> bool:
        if len(chosen) == count:
            return True
        for i in range(start, len(candidates)):
            if used & supports[i]:
                continue
            chosen.append(i)
            if dfs(i + 1, used | supports[i]):
                return True
            chosen.pop()
        return False

    if not dfs(0, frozenset()):
        raise PartitionError(
            f"no {count}-fold disjoint representative family for logical "
            f"({pair.a},{pair.b}) kind {kind}"
        )
    reps = [candidates[i] for i in chosen]
    part = RepresentativePartition(
        kind=kind,
        a=pair.a,
        b=pair.b,
        canonical=canonical.copy(),
        reps=reps,
        spans=[_op_span(code, kind, op) for op in reps],
    )
    verify_partition(code, part)
    return part


def verify_partition(code: LaCrossCode, part: RepresentativePartition) -> None:
    """Check disjointness, coset membership, and the span bound."""
    stab = code.hx if part.kind == "X" else code.hz
    reducer = RowspaceReducer(stab)
    max_span = max(2, code.spec.k - 1)
    seen: set[int] = set()
    for op, span in zip(part.reps, part.spans):
        sup = set(op.support())
        assert sup, "empty representative"
        assert not (seen & sup), "representatives overlap"
        seen |= sup
        assert reducer.contains(op ^ part.canonical), "not in the stabilizer coset"
        assert len(span) <= max_span, f"span {len(span)} exceeds bound {max_span}"
        assert span == _op_span(code, part.kind, op)
