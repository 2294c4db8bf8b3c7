"""Frame sampler tests.

The load-bearing check: propagating every mechanism through the frame
simulator must reproduce, signature for signature, what the symbolic
tableau derives for the same noisy circuit. The two simulators share no
code beyond the instruction format.
"""

import numpy as np
import pytest

from lacross.builders import build_hadamard_gadget, build_memory_experiment
from lacross.circuit import Circuit, NoiseModel
from lacross.codes import build_lacross
from lacross.frames import FrameSampler, enumerate_mechanisms, propagate_mechanisms
from lacross.tableau import tableau_simulate


@pytest.fixture(scope="module")
def noisy_memory20():
    code = build_lacross(4, 2)
    return NoiseModel.uniform(0.003).apply(build_memory_experiment(code, 2))


def frame_signature_dict(circuit):
    mechanisms, det, obs = propagate_mechanisms(circuit)
    out = {}
    for i, m in enumerate(mechanisms):
        dets = frozenset(np.nonzero(det[i])[0].tolist())
        flips = frozenset(np.nonzero(obs[i])[0].tolist())
        if dets or flips:
            out[(m.group, m.pauli)] = (dets, flips, m.prob)
    return out


class TestMechanismEnumeration:
    def test_counts_and_groups(self, noisy_memory20):
        mechanisms = enumerate_mechanisms(noisy_memory20)
        n_dep = sum(1 for ins in noisy_memory20 if ins.name == "DEPOLARIZE2")
        n_err = sum(
            len(ins.targets) for ins in noisy_memory20 if ins.name in ("Z_ERROR", "X_ERROR")
        )
        assert len(mechanisms) == 15 * n_dep + n_err
        assert len({m.group for m in mechanisms}) == n_dep + n_err
        probs = {m.prob for m in mechanisms}
        assert probs == {0.003, 0.003 / 15.0}


class TestSignatureEquivalence:
    def test_memory_matches_tableau(self, noisy_memory20):
        want = tableau_simulate(noisy_memory20).mechanism_signatures()
        got = frame_signature_dict(noisy_memory20)
        assert got == want

    def test_hadamard_matches_tableau(self):
        code = build_lacross(4, 2)
        ideal, _ = build_hadamard_gadget(code, rounds=2)
        noisy = NoiseModel.uniform(0.002).apply(ideal)
        want = tableau_simulate(noisy).mechanism_signatures()
        got = frame_signature_dict(noisy)
        assert got == want


class TestSampling:
    def test_batches_are_reproducible_and_keyed(self, noisy_memory20):
        sampler = FrameSampler(noisy_memory20, batch_size=128)
        d0, o0 = sampler.sample_batch(seed=11, batch_index=0)
        d0b, _ = sampler.sample_batch(seed=11, batch_index=0)
        d1, _ = sampler.sample_batch(seed=11, batch_index=1)
        assert np.array_equal(d0, d0b)
        assert not np.array_equal(d0, d1)
        assert d0.shape == (128, len(noisy_memory20.detectors()))
        assert o0.shape == (128, 1)

    def test_generator_covers_exact_shot_count(self, noisy_memory20):
        sampler = FrameSampler(noisy_memory20, batch_size=100)
        sizes = [d.shape[0] for d, _ in sampler.sample(250, seed=5)]
        assert sizes == [100, 100, 50]

    def test_noiseless_circuit_never_flips(self):
        code = build_lacross(4, 2)
        sampler = FrameSampler(build_memory_experiment(code, 2), batch_size=64)
        det, obs = sampler.sample_batch(seed=1, batch_index=0)
        assert not det.any() and not obs.any()

    def test_depolarize2_marginals(self):
        # forced two-qubit depolarizing: P(flip on one leg) = 8/15,
        # P(joint flip) = 4/15
        circuit = Circuit()
        circuit.append("RESET_Z", [0, 1])
        circuit.append("DEPOLARIZE2", [0, 1], 1.0)
        circuit.append("MEASURE_Z", [0, 1])
        circuit.append("DETECTOR", [0])
        circuit.append("DETECTOR", [1])
        sampler = FrameSampler(circuit, batch_size=10240)
        det, _ = sampler.sample_batch(seed=3, batch_index=0)
        m0, m1 = det.mean(axis=0)
        joint = (det[:, 0] & det[:, 1]).mean()
        assert abs(m0 - 8 / 15) < 0.03 and abs(m1 - 8 / 15) < 0.03
        assert abs(joint - 4 / 15) < 0.03

    def test_error_rate_scales(self, noisy_memory20):
        sampler = FrameSampler(noisy_memory20, batch_size=4096)
        det, _ = sampler.sample_batch(seed=9, batch_index=0)
        rate = det.mean()
        assert 0.0 < rate < 0.1
