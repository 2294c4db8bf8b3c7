"""Clifford circuit IR with detectors, observables, and a uniform noise model.

Instructions are stim-flavored but self-contained: qubit gates take flat
qubit indices, two-qubit gates act on consecutive target pairs, and
measurement-consuming annotations (DETECTOR, OBSERVABLE) reference absolute
measurement indices written as m<idx>. The text form round-trips bit-exactly.

Noise is attached mechanically: one DEPOLARIZE2(p) after every two-qubit
gate, a Z_ERROR(p) after every RESET_X and before every MEASURE_X. RESET_Z
and MEASURE_Z stay noiseless, which is how the experiments keep their data
initialization and final readout clean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

QUBIT_OPS = frozenset(
    {"RESET_Z", "RESET_X", "MEASURE_Z", "MEASURE_X", "CX", "CZ", "H", "DEPOLARIZE2", "Z_ERROR", "X_ERROR"}
)

# the 15 non-identity outcomes of two-qubit depolarizing noise, in the pinned
# enumeration order shared by every consumer (sampler, tableau, extractor)
_P4 = ("I", "X", "Y", "Z")
DEPOLARIZE2_PAULIS = tuple((a, b) for a in _P4 for b in _P4 if (a, b) != ("I", "I"))
TWO_QUBIT_OPS = frozenset({"CX", "CZ", "DEPOLARIZE2"})
MEASUREMENT_OPS = frozenset({"MEASURE_Z", "MEASURE_X"})
NOISE_OPS = frozenset({"DEPOLARIZE2", "Z_ERROR", "X_ERROR"})
ANNOTATIONS = frozenset({"DETECTOR", "OBSERVABLE", "TICK"})


@dataclass(frozen=True)
class Instruction:
    name: str
    targets: tuple[int, ...] = ()
    arg: float | int | None = None

    def __post_init__(self):
        if self.name not in QUBIT_OPS and self.name not in ANNOTATIONS:
            raise ValueError(f"unknown opcode {self.name!r}")
        if self.name in TWO_QUBIT_OPS:
            if len(self.targets) == 0 or len(self.targets) % 2:
                raise ValueError(f"{self.name} needs an even, nonzero target count")
            for a, b in zip(self.targets[::2], self.targets[1::2]):
                if a == b:
                    raise ValueError(f"{self.name} pair acts twice on qubit {a}")
        elif self.name in QUBIT_OPS or self.name == "DETECTOR":
            if not self.targets:
                raise ValueError(f"{self.name} needs at least one target")
        if self.name == "TICK" and self.targets:
            raise ValueError("TICK takes no targets")
        if self.name == "OBSERVABLE" and (self.arg is None or int(self.arg) != self.arg):
            raise ValueError("OBSERVABLE needs an integer index argument")
        if self.name in NOISE_OPS and self.arg is None:
            raise ValueError(f"{self.name} needs a probability argument")
        if any(t < 0 for t in self.targets):
            raise ValueError("negative target")

    def pairs(self) -> Iterator[tuple[int, int]]:
        assert self.name in TWO_QUBIT_OPS
        return zip(self.targets[::2], self.targets[1::2])

    def to_text(self) -> str:
        parts = [self.name]
        if self.name in NOISE_OPS:
            parts[0] += f"({self.arg!r})"
        elif self.name == "OBSERVABLE":
            parts.append(str(int(self.arg)))
        prefix = "m" if self.name in ("DETECTOR", "OBSERVABLE") else ""
        parts.extend(f"{prefix}{t}" for t in self.targets)
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "Instruction":
        tokens = line.split()
        head = tokens[0]
        arg: float | int | None = None
        if "(" in head:
            head, argtext = head.split("(", 1)
            arg = float(argtext.rstrip(")"))
        rest = tokens[1:]
        if head == "OBSERVABLE":
            arg = int(rest[0])
            rest = rest[1:]
        if head in ("DETECTOR", "OBSERVABLE"):
            targets = tuple(int(tok.lstrip("m")) for tok in rest)
        else:
            targets = tuple(int(tok) for tok in rest)
        return cls(head, targets, arg)


class Circuit:
    """Flat instruction list plus measurement-index bookkeeping."""

    def __init__(self, instructions: Iterable[Instruction] | None = None):
        self.instructions: list[Instruction] = list(instructions or ())

    def append(self, name: str, targets: Iterable[int] = (), arg: float | int | None = None) -> None:
        self.instructions.append(Instruction(name, tuple(targets), arg))

    def extend(self, other: "Circuit") -> None:
        self.instructions.extend(other.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def num_qubits(self) -> int:
        best = -1
        for ins in self.instructions:
            if ins.name in QUBIT_OPS and ins.targets:
                best = max(best, max(ins.targets))
        return best + 1

    @property
    def num_measurements(self) -> int:
        return sum(len(ins.targets) for ins in self.instructions if ins.name in MEASUREMENT_OPS)

    def measurement_qubits(self) -> list[tuple[int, str]]:
        """(qubit, basis) per absolute measurement index."""
        out = []
        for ins in self.instructions:
            if ins.name in MEASUREMENT_OPS:
                basis = "X" if ins.name == "MEASURE_X" else "Z"
                out.extend((q, basis) for q in ins.targets)
        return out

    def detectors(self) -> list[tuple[int, ...]]:
        return [ins.targets for ins in self.instructions if ins.name == "DETECTOR"]

    def observables(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, tuple[int, ...]] = {}
        for ins in self.instructions:
            if ins.name == "OBSERVABLE":
                idx = int(ins.arg)
                out[idx] = out.get(idx, ()) + ins.targets
        return out

    def validate(self) -> None:
        """Annotation refs must point at already-recorded measurements."""
        seen = 0
        for ins in self.instructions:
            if ins.name in MEASUREMENT_OPS:
                seen += len(ins.targets)
            elif ins.name in ("DETECTOR", "OBSERVABLE"):
                for ref in ins.targets:
                    if ref >= seen:
                        raise ValueError(f"{ins.name} references future measurement m{ref}")

    def to_text(self) -> str:
        return "\n".join(ins.to_text() for ins in self.instructions) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        circ = cls()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                circ.instructions.append(Instruction.from_text(line))
        return circ

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.instructions == other.instructions


@dataclass(frozen=True)
class NoiseModel:
    """Probabilities for the three noisy operation classes."""

    p_depolarize2: float
    p_reset_x: float
    p_measure_x: float

    @classmethod
    def uniform(cls, p: float) -> "NoiseModel":
        return cls(p, p, p)

    def apply(self, circuit: Circuit) -> Circuit:
        """Insert noise around every eligible operation of the ideal circuit.

        Multi-pair CX/CZ instructions are split so each physical gate gets
        its own trailing DEPOLARIZE2: an error arising after one coupling of
        a check must still propagate through the later couplings (this is
        what produces hook errors on shared ancillas).
        """
        noisy = Circuit()
        for ins in circuit:
            if ins.name in NOISE_OPS:
                raise ValueError("circuit already carries noise instructions")
            if ins.name == "MEASURE_X" and self.p_measure_x > 0:
                noisy.append("Z_ERROR", ins.targets, self.p_measure_x)
            if ins.name in ("CX", "CZ") and self.p_depolarize2 > 0:
                for a, b in ins.pairs():
                    noisy.append(ins.name, (a, b))
                    noisy.append("DEPOLARIZE2", (a, b), self.p_depolarize2)
                continue
            noisy.instructions.append(ins)
            if ins.name == "RESET_X" and self.p_reset_x > 0:
                noisy.append("Z_ERROR", ins.targets, self.p_reset_x)
        return noisy
