"""Stabilizer simulation with symbolic measurement and error bookkeeping.

A standard CHP tableau (destabilizer/stabilizer rows, bit-packed) is extended
with affine phases: each row's sign is a constant bit XOR a GF(2) linear form
over a symbol vector. Symbols are allocated for every random measurement
outcome ("R") and every potential error event ("M", one per non-identity
Pauli outcome of each noise instruction). Pauli injections never change the
x/z structure of the tableau, only signs, so one symbolic pass is exact for
every error pattern simultaneously.

From the per-measurement affine expressions we get three things at once:
certification that detectors and observables carry no R dependence (i.e. are
deterministic up to noise), fast shot sampling by evaluating the forms, and
the exact detector/observable signature of every error mechanism, which
serves as an independent check of the frame-propagation error model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import DEPOLARIZE2_PAULIS, Circuit

_PAULI_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class DeterminismError(Exception):
    """A detector or observable depends on a random measurement outcome."""


@dataclass(frozen=True)
class Symbol:
    kind: str  # "R" or "M"
    prob: float  # activation probability for M symbols
    group: int  # noise event ordinal; symbols in a group are exclusive
    pauli: tuple[tuple[int, str], ...]  # ((qubit, letter), ...) for M symbols


def _count_capacity(circuit: Circuit) -> int:
    cap = 0
    for ins in circuit:
        if ins.name in ("MEASURE_Z", "MEASURE_X", "RESET_Z", "RESET_X"):
            cap += len(ins.targets)
        elif ins.name == "DEPOLARIZE2":
            cap += 15 * (len(ins.targets) // 2)
        elif ins.name in ("Z_ERROR", "X_ERROR"):
            cap += len(ins.targets)
    return max(cap, 1)


class SymbolicTableau:
    def __init__(self, num_qubits: int, symbol_capacity: int):
        n = self.n = num_qubits
        self.wq = max(1, (n + 63) // 64)
        self.ws = max(1, (symbol_capacity + 63) // 64)
        rows = 2 * n + 1  # last row is measurement scratch
        self.x = np.zeros((rows, self.wq), dtype=np.uint64)
        self.z = np.zeros((rows, self.wq), dtype=np.uint64)
        self.const = np.zeros(rows, dtype=np.uint8)
        self.coeff = np.zeros((rows, self.ws), dtype=np.uint64)
        for i in range(n):
            self.x[i, i // 64] = np.uint64(1 << (i % 64))
            self.z[n + i, i // 64] = np.uint64(1 << (i % 64))
        self.symbols: list[Symbol] = []
        self._group = 0

    # -- symbols ----------------------------------------------------------

    def _new_symbol(self, kind: str, prob: float, group: int, pauli=()) -> int:
        idx = len(self.symbols)
        assert idx < self.ws * 64, "symbol capacity exceeded"
        self.symbols.append(Symbol(kind, prob, group, tuple(pauli)))
        return idx

    # -- elementary row ops ------------------------------------------------

    def _rowsum(self, t: int, s: int) -> None:
        """Row t := Pauli product (row s) * (row t), with exact sign."""
        xi, zi = self.x[s], self.z[s]
        xh, zh = self.x[t], self.z[t]
        sx = xi & ~zi
        sz = ~xi & zi
        sy = xi & zi
        plus = (sx & xh & zh) | (sz & xh & ~zh) | (sy & ~xh & zh)
        minus = (sx & ~xh & zh) | (sz & xh & zh) | (sy & xh & ~zh)
        g = int(np.bitwise_count(plus).sum()) - int(np.bitwise_count(minus).sum())
        total = (2 * int(self.const[t]) + 2 * int(self.const[s]) + g) % 4
        if t >= self.n:
            # stabilizer and scratch rows only combine commuting Paulis;
            # destabilizer targets may not, and their phases are never read
            assert total in (0, 2), "anticommuting rowsum"
        self.const[t] = total // 2
        self.coeff[t] ^= self.coeff[s]
        self.x[t] = xh ^ xi
        self.z[t] = zh ^ zi

    def _bit(self, arr: np.ndarray, q: int) -> np.ndarray:
        w, b = divmod(q, 64)
        return (arr[:, w] >> np.uint64(b)) & np.uint64(1)

    def _h(self, q: int) -> None:
        w, b = divmod(q, 64)
        xb = self._bit(self.x, q)
        zb = self._bit(self.z, q)
        self.const ^= (xb & zb).astype(np.uint8)
        diff = (xb ^ zb) << np.uint64(b)
        self.x[:, w] ^= diff
        self.z[:, w] ^= diff

    def _cx(self, c: int, t: int) -> None:
        wc, bc = divmod(c, 64)
        wt, bt = divmod(t, 64)
        xc = self._bit(self.x, c)
        zc = self._bit(self.z, c)
        xt = self._bit(self.x, t)
        zt = self._bit(self.z, t)
        self.const ^= (xc & zt & (xt ^ zc ^ np.uint64(1))).astype(np.uint8)
        self.x[:, wt] ^= xc << np.uint64(bt)
        self.z[:, wc] ^= zt << np.uint64(bc)

    def _cz(self, a: int, b: int) -> None:
        self._h(b)
        self._cx(a, b)
        self._h(b)

    # -- measurement and reset ----------------------------------------------

    def _measure_z(self, q: int) -> tuple[int, np.ndarray]:
        n = self.n
        w, b = divmod(q, 64)
        stab_has_x = (self.x[n : 2 * n, w] >> np.uint64(b)) & np.uint64(1)
        hits = np.nonzero(stab_has_x)[0]
        if hits.size:
            p = n + int(hits[0])
            col = (self.x[: 2 * n, w] >> np.uint64(b)) & np.uint64(1)
            for i in np.nonzero(col)[0]:
                if int(i) != p:
                    self._rowsum(int(i), p)
            d = p - n
            self.x[d] = self.x[p]
            self.z[d] = self.z[p]
            self.const[d] = self.const[p]
            self.coeff[d] = self.coeff[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, w] = np.uint64(1 << b)
            sym = self._new_symbol("R", 0.5, -1)
            self.const[p] = 0
            self.coeff[p] = 0
            self.coeff[p, sym // 64] = np.uint64(1 << (sym % 64))
            return 0, self.coeff[p].copy()
        s = 2 * n
        self.x[s] = 0
        self.z[s] = 0
        self.const[s] = 0
        self.coeff[s] = 0
        destab_has_x = (self.x[:n, w] >> np.uint64(b)) & np.uint64(1)
        for i in np.nonzero(destab_has_x)[0]:
            self._rowsum(s, n + int(i))
        return int(self.const[s]), self.coeff[s].copy()

    def _reset_z(self, q: int) -> None:
        c0, cv = self._measure_z(q)
        w, b = divmod(q, 64)
        zb = (self.z[: 2 * self.n, w] >> np.uint64(b)) & np.uint64(1)
        mask = zb.astype(bool)
        if c0:
            self.const[: 2 * self.n][mask] ^= 1
        if cv.any():
            self.coeff[: 2 * self.n][mask] ^= cv[None, :]

    # -- noise -------------------------------------------------------------

    def _inject(self, pauli: tuple[tuple[int, str], ...], sym: int) -> None:
        px = np.zeros(self.wq, dtype=np.uint64)
        pz = np.zeros(self.wq, dtype=np.uint64)
        for q, letter in pauli:
            xbit, zbit = _PAULI_XZ[letter]
            w, b = divmod(q, 64)
            if xbit:
                px[w] |= np.uint64(1 << b)
            if zbit:
                pz[w] |= np.uint64(1 << b)
        rows = 2 * self.n
        anti = (
            np.bitwise_count(self.x[:rows] & pz[None, :]).sum(axis=1, dtype=np.int64)
            + np.bitwise_count(self.z[:rows] & px[None, :]).sum(axis=1, dtype=np.int64)
        ) & 1
        w, b = divmod(sym, 64)
        self.coeff[:rows, w] ^= anti.astype(np.uint64) << np.uint64(b)

    # -- driver --------------------------------------------------------------

    def apply(self, ins) -> list[tuple[int, np.ndarray]]:
        """Process one instruction; returns outcome exprs for measurements."""
        name = ins.name
        exprs: list[tuple[int, np.ndarray]] = []
        if name == "CX":
            for a, b in ins.pairs():
                self._cx(a, b)
        elif name == "CZ":
            for a, b in ins.pairs():
                self._cz(a, b)
        elif name == "H":
            for q in ins.targets:
                self._h(q)
        elif name == "RESET_Z":
            for q in ins.targets:
                self._reset_z(q)
        elif name == "RESET_X":
            for q in ins.targets:
                self._h(q)
                self._reset_z(q)
                self._h(q)
        elif name == "MEASURE_Z":
            for q in ins.targets:
                exprs.append(self._measure_z(q))
        elif name == "MEASURE_X":
            for q in ins.targets:
                self._h(q)
                exprs.append(self._measure_z(q))
                self._h(q)
        elif name == "DEPOLARIZE2":
            for a, b in ins.pairs():
                for pa, pb in DEPOLARIZE2_PAULIS:
                    pauli = tuple((q, l) for q, l in ((a, pa), (b, pb)) if l != "I")
                    sym = self._new_symbol("M", ins.arg / 15.0, self._group, pauli)
                    self._inject(pauli, sym)
                self._group += 1
        elif name in ("Z_ERROR", "X_ERROR"):
            letter = name[0]
            for q in ins.targets:
                sym = self._new_symbol("M", ins.arg, self._group, ((q, letter),))
                self._inject(((q, letter),), sym)
                self._group += 1
        elif name in ("DETECTOR", "OBSERVABLE", "TICK"):
            pass
        else:  # pragma: no cover
            raise ValueError(f"unhandled opcode {name}")
        return exprs

    def run(self, circuit: Circuit) -> "TableauResult":
        num_meas = circuit.num_measurements
        meas_const = np.zeros(num_meas, dtype=np.uint8)
        meas_coeff = np.zeros((num_meas, self.ws), dtype=np.uint64)
        mi = 0
        for ins in circuit:
            for c0, cv in self.apply(ins):
                meas_const[mi] = c0
                meas_coeff[mi] = cv
                mi += 1
        assert mi == num_meas
        return TableauResult(circuit, self.symbols, meas_const, meas_coeff)


@dataclass
class TableauResult:
    """Affine outcome expressions for every measurement of a circuit."""

    circuit: Circuit
    symbols: list[Symbol]
    meas_const: np.ndarray
    meas_coeff: np.ndarray

    def _combine(self, refs: tuple[int, ...]) -> tuple[int, np.ndarray]:
        const = 0
        coeff = np.zeros(self.meas_coeff.shape[1], dtype=np.uint64)
        for r in refs:
            const ^= int(self.meas_const[r])
            coeff ^= self.meas_coeff[r]
        return const, coeff

    def detector_exprs(self) -> tuple[np.ndarray, np.ndarray]:
        dets = self.circuit.detectors()
        const = np.zeros(len(dets), dtype=np.uint8)
        coeff = np.zeros((len(dets), self.meas_coeff.shape[1]), dtype=np.uint64)
        for i, refs in enumerate(dets):
            const[i], coeff[i] = self._combine(refs)
        return const, coeff

    def observable_exprs(self) -> tuple[np.ndarray, np.ndarray]:
        obs = self.circuit.observables()
        num = (max(obs) + 1) if obs else 0
        const = np.zeros(num, dtype=np.uint8)
        coeff = np.zeros((num, self.meas_coeff.shape[1]), dtype=np.uint64)
        for idx, refs in obs.items():
            const[idx], coeff[idx] = self._combine(refs)
        return const, coeff

    def _random_mask(self) -> np.ndarray:
        mask = np.zeros(self.meas_coeff.shape[1], dtype=np.uint64)
        for i, s in enumerate(self.symbols):
            if s.kind == "R":
                mask[i // 64] |= np.uint64(1 << (i % 64))
        return mask

    def certify(self) -> None:
        """Raise unless every detector/observable is noise-deterministic."""
        rmask = self._random_mask()
        _, dcoeff = self.detector_exprs()
        bad = np.nonzero(np.bitwise_count(dcoeff & rmask[None, :]).sum(axis=1))[0]
        if bad.size:
            raise DeterminismError(f"detector {int(bad[0])} depends on a random outcome")
        _, ocoeff = self.observable_exprs()
        bad = np.nonzero(np.bitwise_count(ocoeff & rmask[None, :]).sum(axis=1))[0]
        if bad.size:
            raise DeterminismError(f"observable {int(bad[0])} depends on a random outcome")

    def mechanism_signatures(self) -> dict[tuple[int, tuple], tuple[frozenset, frozenset, float]]:
        """(group, pauli) -> (detector set, observable set, probability).

        Mechanisms that flip nothing are omitted.
        """
        _, dcoeff = self.detector_exprs()
        _, ocoeff = self.observable_exprs()
        det_hits: dict[int, set[int]] = {}
        obs_hits: dict[int, set[int]] = {}
        for mat, store in ((dcoeff, det_hits), (ocoeff, obs_hits)):
            for row in range(mat.shape[0]):
                for w in np.nonzero(mat[row])[0]:
                    word = int(mat[row, w])
                    base = int(w) * 64
                    while word:
                        low = word & -word
                        store.setdefault(base + low.bit_length() - 1, set()).add(row)
                        word ^= low
        out = {}
        for i, s in enumerate(self.symbols):
            if s.kind != "M":
                continue
            dets = frozenset(det_hits.get(i, ()))
            obs = frozenset(obs_hits.get(i, ()))
            if dets or obs:
                out[(s.group, s.pauli)] = (dets, obs, s.prob)
        return out

    def sample_flips(self, shots: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
        """Detector and observable flip bits under the symbolic model.

        R symbols are fair coins; each noise group activates at most one of
        its M symbols (uniformly among them with total group probability
        = sum of member probabilities). Returns (shots, D) and (shots, O)
        uint8 arrays of flips relative to the noiseless run.
        """
        rng = np.random.default_rng(seed)
        nsym = len(self.symbols)
        ws = self.meas_coeff.shape[1]
        _, dcoeff = self.detector_exprs()
        _, ocoeff = self.observable_exprs()

        groups: dict[int, list[int]] = {}
        for i, s in enumerate(self.symbols):
            if s.kind == "M":
                groups.setdefault(s.group, []).append(i)

        det = np.zeros((shots, dcoeff.shape[0]), dtype=np.uint8)
        obs = np.zeros((shots, ocoeff.shape[0]), dtype=np.uint8)
        for shot in range(shots):
            assign = np.zeros(ws, dtype=np.uint64)
            for i, s in enumerate(self.symbols):
                if s.kind == "R" and rng.integers(2):
                    assign[i // 64] |= np.uint64(1 << (i % 64))
            for members in groups.values():
                ptot = sum(self.symbols[m].prob for m in members)
                if rng.random() < ptot:
                    pick = members[int(rng.integers(len(members)))]
                    assign[pick // 64] |= np.uint64(1 << (pick % 64))
            det[shot] = np.bitwise_count(dcoeff & assign[None, :]).sum(axis=1) & 1
            obs[shot] = np.bitwise_count(ocoeff & assign[None, :]).sum(axis=1) & 1
        return det, obs


def tableau_simulate(circuit: Circuit) -> TableauResult:
    """Run the symbolic tableau over the whole circuit."""
    tab = SymbolicTableau(circuit.num_qubits, _count_capacity(circuit))
    return tab.run(circuit)
