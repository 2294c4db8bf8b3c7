"""Detector error models: extraction, merging, and on-disk formats.

A detector error model lists independent error channels, each flipping a
set of detectors and possibly logical observables. Channels are obtained by
propagating every elementary circuit fault through the Pauli-frame
simulator; faults with identical flip signatures are merged with the parity
rule p = 1/2 - 1/2 * prod(1 - 2 p_i), and faults that flip nothing are
dropped. Channel order is the circuit order of each signature's first
contributing mechanism, which keeps decoder tie-breaking reproducible.

Text form:  header `dem <num_detectors> <num_observables>`, then one
`error(<prob>) D<i> ... L<j> ...` line per channel; probabilities use repr
so the round trip is bit exact.

Shot files: little-endian header (magic "LXSH", u32 shots, u32 detectors,
u32 observables), then one byte-padded packbits row per shot holding the
detector bits followed by the observable bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .frames import propagate_mechanisms

SHOT_MAGIC = b"LXSH"


class MalformedDemError(Exception):
    """The model cannot support the requested operation."""


@dataclass
class DetectorErrorModel:
    num_detectors: int
    num_observables: int
    probs: list[float] = field(default_factory=list)
    dets: list[tuple[int, ...]] = field(default_factory=list)
    obs: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def num_errors(self) -> int:
        return len(self.probs)

    def add(self, prob: float, dets: tuple[int, ...], obs: tuple[int, ...]) -> None:
        assert all(0 <= d < self.num_detectors for d in dets)
        assert all(0 <= o < self.num_observables for o in obs)
        self.probs.append(prob)
        self.dets.append(tuple(sorted(dets)))
        self.obs.append(tuple(sorted(obs)))

    def to_text(self) -> str:
        lines = [f"dem {self.num_detectors} {self.num_observables}"]
        for p, ds, os_ in zip(self.probs, self.dets, self.obs):
            parts = [f"error({p!r})"]
            parts += [f"D{d}" for d in ds]
            parts += [f"L{o}" for o in os_]
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DetectorErrorModel":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        head = lines[0].split()
        if head[0] != "dem" or len(head) != 3:
            raise MalformedDemError("missing dem header")
        model = cls(int(head[1]), int(head[2]))
        for line in lines[1:]:
            tokens = line.split()
            if not tokens[0].startswith("error("):
                raise MalformedDemError(f"bad dem line {line!r}")
            prob = float(tokens[0][len("error(") : -1])
            dets = tuple(int(t[1:]) for t in tokens[1:] if t[0] == "D")
            obs = tuple(int(t[1:]) for t in tokens[1:] if t[0] == "L")
            model.add(prob, dets, obs)
        return model


def extract_dem(circuit: Circuit) -> DetectorErrorModel:
    """Build the merged detector error model of a noisy circuit."""
    mechanisms, det, obs = propagate_mechanisms(circuit)
    model = DetectorErrorModel(len(circuit.detectors()), len(circuit.observables()))
    order: dict[tuple, int] = {}
    residuals: list[float] = []  # prod(1 - 2p) per signature
    for i, m in enumerate(mechanisms):
        ds = tuple(np.nonzero(det[i])[0].tolist())
        os_ = tuple(np.nonzero(obs[i])[0].tolist())
        if not ds and not os_:
            continue
        key = (ds, os_)
        if key not in order:
            order[key] = len(residuals)
            residuals.append(1.0)
            model.dets.append(ds)
            model.obs.append(os_)
        residuals[order[key]] *= 1.0 - 2.0 * m.prob
    model.probs = [0.5 - 0.5 * r for r in residuals]
    return model


def write_shots(path, det: np.ndarray, obs: np.ndarray) -> None:
    det = np.asarray(det, dtype=bool)
    obs = np.asarray(obs, dtype=bool)
    assert det.shape[0] == obs.shape[0]
    shots, d = det.shape
    o = obs.shape[1]
    header = SHOT_MAGIC + np.array([shots, d, o], dtype="<u4").tobytes()
    packed = np.packbits(np.concatenate([det, obs], axis=1), axis=1, bitorder="little")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed.tobytes())


def read_shots(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != SHOT_MAGIC:
        raise ValueError("not a shot file")
    shots, d, o = np.frombuffer(raw[4:16], dtype="<u4")
    row_bytes = (int(d) + int(o) + 7) // 8
    packed = np.frombuffer(raw[16:], dtype=np.uint8).reshape(int(shots), row_bytes)
    bits = np.unpackbits(packed, axis=1, bitorder="little")[:, : int(d) + int(o)]
    return bits[:, : int(d)].astype(bool), bits[:, int(d) :].astype(bool)
