"""Circuit IR: construction rules, text round-trip, noise insertion."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacross.circuit import Circuit, Instruction, NoiseModel


class TestInstruction:
    def test_rejects_unknown_opcode(self):
        with pytest.raises(ValueError):
            Instruction("CNOT", (0, 1))

    def test_rejects_odd_pair_count(self):
        with pytest.raises(ValueError):
            Instruction("CX", (0, 1, 2))

    def test_rejects_self_pair(self):
        with pytest.raises(ValueError):
            Instruction("CZ", (3, 3))

    def test_rejects_missing_probability(self):
        with pytest.raises(ValueError):
            Instruction("Z_ERROR", (0,))

    def test_observable_needs_index(self):
        with pytest.raises(ValueError):
            Instruction("OBSERVABLE", (1,))

    def test_text_forms(self):
        assert Instruction("CX", (0, 1, 4, 5)).to_text() == "CX 0 1 4 5"
        assert Instruction("DEPOLARIZE2", (0, 1), 0.001).to_text() == "DEPOLARIZE2(0.001) 0 1"
        assert Instruction("DETECTOR", (3, 17)).to_text() == "DETECTOR m3 m17"
        assert Instruction("OBSERVABLE", (41, 52), 0).to_text() == "OBSERVABLE 0 m41 m52"
        assert Instruction("TICK").to_text() == "TICK"


class TestCircuit:
    def test_measurement_bookkeeping(self):
        c = Circuit()
        c.append("RESET_Z", [0, 1, 2])
        c.append("MEASURE_Z", [0, 1])
        c.append("MEASURE_X", [2])
        assert c.num_measurements == 3
        assert c.measurement_qubits() == [(0, "Z"), (1, "Z"), (2, "X")]
        assert c.num_qubits == 3

    def test_validate_rejects_future_reference(self):
        c = Circuit()
        c.append("MEASURE_Z", [0])
        c.append("DETECTOR", [1])
        with pytest.raises(ValueError):
            c.validate()

    def test_roundtrip_explicit(self):
        text = (
            "RESET_Z 0 1 2\n"
            "H 0\n"
            "CX 0 1\n"
            "DEPOLARIZE2(0.00123) 0 1\n"
            "TICK\n"
            "MEASURE_X 0 1\n"
            "DETECTOR m0 m1\n"
            "OBSERVABLE 0 m1\n"
        )
        c = Circuit.from_text(text)
        assert c.to_text() == text

    def test_parse_ignores_comments_and_blanks(self):
        c = Circuit.from_text("# header\n\nH 0  # trailing\n")
        assert len(c) == 1 and c.instructions[0].name == "H"

    @given(st.floats(min_value=1e-6, max_value=0.5, allow_nan=False))
    @settings(max_examples=30)
    def test_probability_roundtrip_exact(self, p):
        ins = Instruction("DEPOLARIZE2", (0, 1), p)
        back = Instruction.from_text(ins.to_text())
        assert back.arg == p


class TestNoiseModel:
    def test_exact_insertion_multiset(self):
        ideal = Circuit()
        ideal.append("RESET_X", [0, 1])
        ideal.append("CX", [0, 2])
        ideal.append("CZ", [1, 3])
        ideal.append("RESET_Z", [4])
        ideal.append("MEASURE_X", [0])
        ideal.append("MEASURE_Z", [4])
        noisy = NoiseModel.uniform(0.01).apply(ideal)
        names = [ins.name for ins in noisy]
        assert names == [
            "RESET_X", "Z_ERROR",
            "CX", "DEPOLARIZE2",
            "CZ", "DEPOLARIZE2",
            "RESET_Z",
            "Z_ERROR", "MEASURE_X",
            "MEASURE_Z",
        ]
        # Z_ERROR precedes MEASURE_X and follows RESET_X, on the same targets
        assert noisy.instructions[1].targets == (0, 1)
        assert noisy.instructions[7].targets == (0,)

    def test_multipair_gate_gets_per_pair_noise(self):
        # grouped couplings must be split so an ancilla error after one
        # coupling still propagates through the later couplings of the check
        ideal = Circuit()
        ideal.append("CX", [9, 0, 9, 1, 9, 2])
        noisy = NoiseModel.uniform(0.01).apply(ideal)
        got = [(ins.name, ins.targets) for ins in noisy]
        assert got == [
            ("CX", (9, 0)), ("DEPOLARIZE2", (9, 0)),
            ("CX", (9, 1)), ("DEPOLARIZE2", (9, 1)),
            ("CX", (9, 2)), ("DEPOLARIZE2", (9, 2)),
        ]

    def test_zero_rate_is_identity(self):
        ideal = Circuit()
        ideal.append("CX", [0, 1])
        ideal.append("MEASURE_X", [0])
        assert NoiseModel.uniform(0.0).apply(ideal) == ideal

    def test_refuses_double_noise(self):
        c = Circuit()
        c.append("CX", [0, 1])
        noisy = NoiseModel.uniform(0.1).apply(c)
        with pytest.raises(ValueError):
            NoiseModel.uniform(0.1).apply(noisy)
