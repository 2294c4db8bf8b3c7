"""Backward derivation of detector and observable measurement sets.

To find which measurement outcomes determine the value of a Pauli operator P
at some point in a circuit, conjugate P backward through the instructions.
Measurement crossings absorb matching single-qubit components into the
outcome set (anticommuting components mean P has no deterministic value and
the walk fails); reset crossings peel matching components silently (their
value is fixed by the preparation). At registered round boundaries the
accumulated operator is reduced against the stabilizers measured by that
round: the solvable projection is replaced by the corresponding outcome
indices, anything else keeps walking. A walk that reaches the start of the
circuit empty-handed has expressed P as an XOR of outcomes; that XOR is the
detector (or observable) measurement set.

The walk runs on the ideal circuit; inserting noise instructions afterwards
does not add measurements, so the derived indices stay valid.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, MEASUREMENT_OPS
from .gf2 import BitVector, RowspaceReducer


class WalkError(Exception):
    """The requested operator is not a deterministic function of outcomes."""


@dataclass
class PeelPoint:
    """Reduce one Pauli component against a measured stabilizer family.

    gap is an instruction-boundary index: peels fire when the backward walk
    stands between instructions gap-1 and gap. The reducer spans the rows of
    the family's parity matrix over a `width`-qubit block starting at
    `offset`; outcomes[i] is the absolute measurement index of row i's
    syndrome bit in the round that ends at this gap.
    """

    gap: int
    component: str  # "X" or "Z"
    offset: int
    width: int
    reducer: RowspaceReducer
    outcomes: list[int]


class BackwardWalker:
    def __init__(self, circuit: Circuit, peels: list[PeelPoint] = ()):  # type: ignore[assignment]
        self.circuit = circuit
        self.nq = circuit.num_qubits
        self.meas_base: list[int] = []
        base = 0
        for ins in circuit:
            self.meas_base.append(base)
            if ins.name in MEASUREMENT_OPS:
                base += len(ins.targets)
        self.peel_map: dict[int, list[PeelPoint]] = {}
        for p in peels:
            self.peel_map.setdefault(p.gap, []).append(p)

    def _apply_peels(self, gap: int, x: BitVector, z: BitVector, absorbed: set) -> None:
        for spec in self.peel_map.get(gap, ()):
            comp = x if spec.component == "X" else z
            bits = comp.to_bits()
            window = bits[spec.offset : spec.offset + spec.width]
            if not window.any():
                continue
            residual, combo = spec.reducer.reduce(BitVector.from_bits(window))
            if combo.is_zero():
                continue
            for i in range(spec.width):
                comp.set(spec.offset + i, int(residual.get(i)))
            absorbed.symmetric_difference_update(spec.outcomes[r] for r in combo.support())

    def walk(
        self,
        x_support: BitVector,
        z_support: BitVector,
        start_gap: int | None = None,
        seed_outcomes: set[int] | None = None,
    ) -> tuple[int, ...]:
        """Express the operator at start_gap as an XOR of measurement outcomes."""
        x = x_support.copy()
        z = z_support.copy()
        assert x.nbits == self.nq and z.nbits == self.nq
        absorbed: set[int] = set(seed_outcomes or ())
        gap = len(self.circuit.instructions) if start_gap is None else start_gap

        while gap > 0:
            self._apply_peels(gap, x, z, absorbed)
            if x.is_zero() and z.is_zero():
                return tuple(sorted(absorbed))
            ins = self.circuit.instructions[gap - 1]
            name = ins.name
            if name == "H":
                for q in ins.targets:
                    xb, zb = x.get(q), z.get(q)
                    if xb != zb:
                        x.flip(q)
                        z.flip(q)
            elif name == "CX":
                for a, b in reversed(list(ins.pairs())):
                    if x.get(a):
                        x.flip(b)
                    if z.get(b):
                        z.flip(a)
            elif name == "CZ":
                for a, b in reversed(list(ins.pairs())):
                    if x.get(a):
                        z.flip(b)
                    if x.get(b):
                        z.flip(a)
            elif name in ("MEASURE_X", "MEASURE_Z"):
                checks, absorbs = (z, x) if name == "MEASURE_X" else (x, z)
                for pos in range(len(ins.targets) - 1, -1, -1):
                    q = ins.targets[pos]
                    if checks.get(q):
                        raise WalkError(f"operator anticommutes with {name} on qubit {q}")
                    if absorbs.get(q):
                        absorbs.set(q, 0)
                        absorbed.symmetric_difference_update({self.meas_base[gap - 1] + pos})
            elif name == "RESET_X":
                for q in ins.targets:
                    if z.get(q):
                        raise WalkError(f"operator anticommutes with RESET_X on qubit {q}")
                    x.set(q, 0)
            elif name == "RESET_Z":
                for q in ins.targets:
                    if x.get(q):
                        raise WalkError(f"operator anticommutes with RESET_Z on qubit {q}")
                    z.set(q, 0)
            # noise and annotations don't move Paulis
            gap -= 1

        self._apply_peels(0, x, z, absorbed)
        if not (x.is_zero() and z.is_zero()):
            raise WalkError("operator survives to the start of the circuit")
        return tuple(sorted(absorbed))
