"""Shared test helpers.

Two independent oracles live here: a dense statevector Clifford simulator
(written in the most boring way possible, explicit amplitude arrays,
little-endian qubit bits) that arbitrates disagreements with the packed
tableau implementation, and an exhaustive minimum-score predictor over all
error-channel sets of weight <= 2 that arbitrates decoder outputs.
"""

import numpy as np

_SQRT2 = np.sqrt(2.0)


class StatevectorSim:
    """Small exact simulator; measurement randomness comes from the given rng."""

    def __init__(self, num_qubits: int, rng: np.random.Generator):
        self.n = num_qubits
        self.rng = rng
        self.psi = np.zeros(1 << num_qubits, dtype=np.complex128)
        self.psi[0] = 1.0

    def _halves(self, q: int):
        s = np.arange(len(self.psi))
        i0 = s[(s >> q) & 1 == 0]
        return i0, i0 + (1 << q)

    def h(self, q: int):
        i0, i1 = self._halves(q)
        a, b = self.psi[i0].copy(), self.psi[i1].copy()
        self.psi[i0] = (a + b) / _SQRT2
        self.psi[i1] = (a - b) / _SQRT2

    def x(self, q: int):
        i0, i1 = self._halves(q)
        self.psi[i0], self.psi[i1] = self.psi[i1].copy(), self.psi[i0].copy()

    def z(self, q: int):
        _, i1 = self._halves(q)
        self.psi[i1] *= -1.0

    def y(self, q: int):
        # exact Y = i X Z, global phase included
        self.z(q)
        self.x(q)
        self.psi *= 1j

    def pauli(self, q: int, letter: str):
        getattr(self, letter.lower())(q)

    def cx(self, c: int, t: int):
        s = np.arange(len(self.psi))
        src = s[((s >> c) & 1 == 1) & ((s >> t) & 1 == 0)]
        dst = src + (1 << t)
        self.psi[src], self.psi[dst] = self.psi[dst].copy(), self.psi[src].copy()

    def cz(self, a: int, b: int):
        s = np.arange(len(self.psi))
        both = s[((s >> a) & 1 == 1) & ((s >> b) & 1 == 1)]
        self.psi[both] *= -1.0

    def measure_z(self, q: int) -> tuple[int, bool]:
        """Collapse; returns (outcome, was_random)."""
        s = np.arange(len(self.psi))
        m1 = (s >> q) & 1 == 1
        p1 = float(np.sum(np.abs(self.psi[m1]) ** 2))
        if p1 < 1e-9:
            outcome, random = 0, False
        elif p1 > 1 - 1e-9:
            outcome, random = 1, False
        else:
            assert abs(p1 - 0.5) < 1e-9, "stabilizer measurement must be 0, 1/2 or 1"
            outcome, random = int(self.rng.integers(2)), True
        keep = m1 if outcome else ~m1
        self.psi[~keep] = 0.0
        self.psi /= np.sqrt(np.sum(np.abs(self.psi) ** 2))
        return outcome, random

    def reset_z(self, q: int) -> None:
        outcome, _ = self.measure_z(q)
        if outcome:
            self.x(q)

    def reset_x(self, q: int) -> None:
        self.h(q)
        self.reset_z(q)
        self.h(q)

    def measure_x(self, q: int) -> tuple[int, bool]:
        self.h(q)
        out = self.measure_z(q)
        self.h(q)
        return out

    def apply_pauli_string(self, pauli) -> None:
        for q, letter in pauli:
            self.pauli(q, letter)


def pack_signatures(dem):
    """Bit-packed detector columns, observable masks, and prior scores.

    Returns (syn (E, words) uint64, obs (E,) uint64, score (E,) float64)
    with score[i] = ln((1 - p_i) / p_i), the per-channel flip cost.
    """
    words = max((dem.num_detectors + 63) // 64, 1)
    syn = np.zeros((dem.num_errors, words), dtype=np.uint64)
    obs = np.zeros(dem.num_errors, dtype=np.uint64)
    one = np.uint64(1)
    for i, (ds, os_) in enumerate(zip(dem.dets, dem.obs)):
        for d in ds:
            syn[i, d >> 6] ^= one << np.uint64(d & 63)
        for o in os_:
            obs[i] ^= one << np.uint64(o)
    probs = np.asarray(dem.probs, dtype=np.float64)
    return syn, obs, np.log((1.0 - probs) / probs)


def min_score_oracle(dem):
    """Exhaustive minimum-score predictions over channel sets of weight <= 2.

    Returns {syndrome_bytes: (min_score, {observable masks within 1e-9 of
    the min})}; the weight-0 empty set claims the zero syndrome at score 0.
    Near-ties are kept as a set because a decoder may legitimately return
    any of them.
    """
    syn, obs, score = pack_signatures(dem)
    num = dem.num_errors
    table: dict[bytes, tuple[float, set[int]]] = {}

    def fold(key, sc, mask):
        hit = table.get(key)
        if hit is None or sc < hit[0] - 1e-9:
            table[key] = (sc, {int(mask)})
        elif sc <= hit[0] + 1e-9:
            hit[1].add(int(mask))

    fold(np.zeros_like(syn[0]).tobytes(), 0.0, 0)
    for i in range(num):
        fold(syn[i].tobytes(), float(score[i]), obs[i])
    for i in range(num):
        pair_syn = syn[i] ^ syn[i + 1 :]
        pair_score = score[i] + score[i + 1 :]
        pair_obs = obs[i] ^ obs[i + 1 :]
        for j in range(pair_syn.shape[0]):
            fold(pair_syn[j].tobytes(), float(pair_score[j]), pair_obs[j])
    return table


def unpack_syndrome(key, num_detectors):
    """Inverse of the packed-word tobytes key: a length-D uint8 bit vector."""
    words = np.frombuffer(key, dtype=np.uint64)
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")
    return np.ascontiguousarray(bits[:num_detectors], dtype=np.uint8)


def obs_bits_to_mask(bits):
    mask = 0
    for o in np.flatnonzero(bits):
        mask |= 1 << int(o)
    return mask
