"""Vectorized Pauli-frame simulation of noisy Clifford circuits.

A frame is the Pauli difference between the noisy run and a noiseless
reference, stored as two boolean planes (X and Z components) of shape
(num_qubits, batch). Clifford gates act linearly on the planes, resets clear
them, and a measurement outcome is flipped exactly when the frame
anticommutes with the measured operator. Detectors and observables built
from deterministic parities therefore read their flips directly off the
frame; the circuits here are certified deterministic by the symbolic
tableau before sampling.

Shot batches are reproducible in isolation: batch b of a run seeded s uses
a Philox generator keyed (s, b), so shot i does not depend on how many
total shots were requested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import DEPOLARIZE2_PAULIS, Circuit

_XA = np.array([pa in "XY" for pa, _ in DEPOLARIZE2_PAULIS])
_ZA = np.array([pa in "ZY" for pa, _ in DEPOLARIZE2_PAULIS])
_XB = np.array([pb in "XY" for _, pb in DEPOLARIZE2_PAULIS])
_ZB = np.array([pb in "ZY" for _, pb in DEPOLARIZE2_PAULIS])


@dataclass(frozen=True)
class Mechanism:
    """One elementary fault, keyed exactly like the tableau's noise symbols."""

    group: int
    pauli: tuple[tuple[int, str], ...]
    prob: float


def enumerate_mechanisms(circuit: Circuit) -> list[Mechanism]:
    """All elementary faults of a noisy circuit, in circuit order.

    Each DEPOLARIZE2 pair contributes its 15 outcomes (one shared group);
    each Z_ERROR/X_ERROR target is its own single-mechanism group. Group
    numbering matches the symbolic tableau so signatures can be compared
    mechanism by mechanism.
    """
    out: list[Mechanism] = []
    group = 0
    for ins in circuit:
        if ins.name == "DEPOLARIZE2":
            for a, b in ins.pairs():
                for pa, pb in DEPOLARIZE2_PAULIS:
                    pauli = tuple((q, l) for q, l in ((a, pa), (b, pb)) if l != "I")
                    out.append(Mechanism(group, pauli, ins.arg / 15.0))
                group += 1
        elif ins.name in ("Z_ERROR", "X_ERROR"):
            letter = ins.name[0]
            for q in ins.targets:
                out.append(Mechanism(group, ((q, letter),), ins.arg))
                group += 1
    return out


def _xor_swap(x: np.ndarray, z: np.ndarray, q: int) -> None:
    x[q] ^= z[q]
    z[q] ^= x[q]
    x[q] ^= z[q]


class FrameSampler:
    """Batched detector/observable flip sampling for one noisy circuit."""

    def __init__(self, circuit: Circuit, batch_size: int = 1024):
        circuit.validate()
        self.circuit = circuit
        self.batch_size = batch_size
        self.nq = circuit.num_qubits
        self.n_meas = circuit.num_measurements
        self.det_refs = [np.array(refs, dtype=np.intp) for refs in circuit.detectors()]
        obs = circuit.observables()
        self.obs_refs = [np.array(obs[i], dtype=np.intp) for i in sorted(obs)]

    def _run_frames(self, rng: np.random.Generator, width: int) -> np.ndarray:
        x = np.zeros((self.nq, width), dtype=bool)
        z = np.zeros((self.nq, width), dtype=bool)
        meas = np.zeros((self.n_meas, width), dtype=bool)
        mi = 0
        for ins in self.circuit:
            name = ins.name
            if name == "CX":
                for a, b in ins.pairs():
                    x[b] ^= x[a]
                    z[a] ^= z[b]
            elif name == "CZ":
                for a, b in ins.pairs():
                    z[b] ^= x[a]
                    z[a] ^= x[b]
            elif name == "DEPOLARIZE2":
                for a, b in ins.pairs():
                    u = rng.random(width)
                    err = u < ins.arg
                    k = np.minimum((u * (15.0 / ins.arg)).astype(np.intp), 14)
                    x[a] ^= err & _XA[k]
                    z[a] ^= err & _ZA[k]
                    x[b] ^= err & _XB[k]
                    z[b] ^= err & _ZB[k]
            elif name == "H":
                for q in ins.targets:
                    _xor_swap(x, z, q)
            elif name == "MEASURE_Z":
                t = list(ins.targets)
                meas[mi : mi + len(t)] = x[t]
                mi += len(t)
            elif name == "MEASURE_X":
                t = list(ins.targets)
                meas[mi : mi + len(t)] = z[t]
                mi += len(t)
            elif name in ("RESET_Z", "RESET_X"):
                t = list(ins.targets)
                x[t] = False
                z[t] = False
            elif name == "Z_ERROR":
                t = list(ins.targets)
                z[t] ^= rng.random((len(t), width)) < ins.arg
            elif name == "X_ERROR":
                t = list(ins.targets)
                x[t] ^= rng.random((len(t), width)) < ins.arg
            # TICK / DETECTOR / OBSERVABLE carry no frame action
        assert mi == self.n_meas
        return meas

    def _reduce(self, meas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        width = meas.shape[1]
        det = np.zeros((len(self.det_refs), width), dtype=bool)
        for i, refs in enumerate(self.det_refs):
            det[i] = np.bitwise_xor.reduce(meas[refs], axis=0)
        obs = np.zeros((len(self.obs_refs), width), dtype=bool)
        for i, refs in enumerate(self.obs_refs):
            obs[i] = np.bitwise_xor.reduce(meas[refs], axis=0)
        return det.T, obs.T

    def sample_batch(self, seed: int, batch_index: int) -> tuple[np.ndarray, np.ndarray]:
        """(batch, D) and (batch, O) flip planes for one keyed batch."""
        key = np.array([seed, batch_index], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        return self._reduce(self._run_frames(rng, self.batch_size))

    def sample(self, shots: int, seed: int):
        """Yield (det, obs) batches covering exactly `shots` shots."""
        done = 0
        index = 0
        while done < shots:
            det, obs = self.sample_batch(seed, index)
            take = min(self.batch_size, shots - done)
            yield det[:take], obs[:take]
            done += take
            index += 1


def propagate_mechanisms(circuit: Circuit) -> tuple[list[Mechanism], np.ndarray, np.ndarray]:
    """Deterministic frame propagation of every mechanism at once.

    Column m carries exactly mechanism m's Pauli, injected at its own noise
    site. Returns (mechanisms, det_flips, obs_flips) with flip planes of
    shape (num_mechanisms, D) and (num_mechanisms, O); row m is mechanism
    m's detector/observable signature.
    """
    mechanisms = enumerate_mechanisms(circuit)
    sampler = FrameSampler(circuit)
    width = len(mechanisms)
    x = np.zeros((sampler.nq, width), dtype=bool)
    z = np.zeros((sampler.nq, width), dtype=bool)
    meas = np.zeros((sampler.n_meas, width), dtype=bool)
    mi = 0
    col = 0
    for ins in circuit:
        name = ins.name
        if name in ("DEPOLARIZE2", "Z_ERROR", "X_ERROR"):
            count = 15 * len(ins.targets) // 2 if name == "DEPOLARIZE2" else len(ins.targets)
            for m in range(col, col + count):
                for q, letter in mechanisms[m].pauli:
                    if letter in "XY":
                        x[q, m] ^= True
                    if letter in "ZY":
                        z[q, m] ^= True
            col += count
        elif name == "CX":
            for a, b in ins.pairs():
                x[b] ^= x[a]
                z[a] ^= z[b]
        elif name == "CZ":
            for a, b in ins.pairs():
                z[b] ^= x[a]
                z[a] ^= x[b]
        elif name == "H":
            for q in ins.targets:
                _xor_swap(x, z, q)
        elif name == "MEASURE_Z":
            t = list(ins.targets)
            meas[mi : mi + len(t)] = x[t]
            mi += len(t)
        elif name == "MEASURE_X":
            t = list(ins.targets)
            meas[mi : mi + len(t)] = z[t]
            mi += len(t)
        elif name in ("RESET_Z", "RESET_X"):
            t = list(ins.targets)
            x[t] = False
            z[t] = False
    assert col == width and mi == sampler.n_meas
    det = np.zeros((len(sampler.det_refs), width), dtype=bool)
    for i, refs in enumerate(sampler.det_refs):
        det[i] = np.bitwise_xor.reduce(meas[refs], axis=0)
    obs = np.zeros((len(sampler.obs_refs), width), dtype=bool)
    for i, refs in enumerate(sampler.obs_refs):
        obs[i] = np.bitwise_xor.reduce(meas[refs], axis=0)
    return mechanisms, det.T, obs.T
