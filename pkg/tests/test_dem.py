"""Detector error model tests: merging, formats, tableau cross-check."""

import numpy as np
import pytest

from lacross.builders import build_memory_experiment
from lacross.circuit import Circuit, NoiseModel
from lacross.codes import build_lacross
from lacross.dem import DetectorErrorModel, extract_dem, read_shots, write_shots
from lacross.tableau import tableau_simulate


@pytest.fixture(scope="module")
def noisy_memory20():
    code = build_lacross(4, 2)
    return NoiseModel.uniform(0.002).apply(build_memory_experiment(code, 2))


class TestExtraction:
    def test_same_signature_faults_merge_with_parity_rule(self):
        circuit = Circuit()
        circuit.append("RESET_Z", [0])
        circuit.append("X_ERROR", [0], 0.1)
        circuit.append("X_ERROR", [0], 0.25)
        circuit.append("MEASURE_Z", [0])
        circuit.append("DETECTOR", [0])
        model = extract_dem(circuit)
        assert model.num_errors == 1
        assert model.dets == [(0,)] and model.obs == [()]
        p1, p2 = 0.1, 0.25
        assert model.probs[0] == pytest.approx(p1 + p2 - 2 * p1 * p2)

    def test_extraction_matches_merged_tableau_signatures(self, noisy_memory20):
        model = extract_dem(noisy_memory20)
        merged: dict[tuple, float] = {}
        for dets, obs, prob in tableau_simulate(noisy_memory20).mechanism_signatures().values():
            key = (tuple(sorted(dets)), tuple(sorted(obs)))
            merged[key] = merged.get(key, 1.0) * (1.0 - 2.0 * prob)
        assert {(d, o) for d, o in zip(model.dets, model.obs)} == set(merged)
        for p, d, o in zip(model.probs, model.dets, model.obs):
            assert p == pytest.approx(0.5 - 0.5 * merged[(d, o)])

    def test_basic_wellformedness(self, noisy_memory20):
        model = extract_dem(noisy_memory20)
        assert model.num_detectors == len(noisy_memory20.detectors())
        assert model.num_observables == 1
        assert model.num_errors > 0
        for p, ds, os_ in zip(model.probs, model.dets, model.obs):
            assert 0.0 < p < 0.5
            assert ds or os_
            assert all(0 <= d < model.num_detectors for d in ds)
            assert list(ds) == sorted(ds)


class TestFormats:
    def test_text_roundtrip_bit_exact(self, noisy_memory20):
        model = extract_dem(noisy_memory20)
        back = DetectorErrorModel.from_text(model.to_text())
        assert back.probs == model.probs
        assert back.dets == model.dets and back.obs == model.obs
        assert (back.num_detectors, back.num_observables) == (
            model.num_detectors, model.num_observables,
        )

    def test_text_rejects_garbage(self):
        with pytest.raises(Exception):
            DetectorErrorModel.from_text("not a dem\n")

    def test_shot_file_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        det = rng.random((37, 13)) < 0.3
        obs = rng.random((37, 3)) < 0.5
        path = tmp_path / "shots.bin"
        write_shots(path, det, obs)
        det2, obs2 = read_shots(path)
        assert np.array_equal(det, det2) and np.array_equal(obs, obs2)

    def test_shot_file_header(self, tmp_path):
        path = tmp_path / "shots.bin"
        write_shots(path, np.zeros((2, 5), bool), np.zeros((2, 1), bool))
        raw = path.read_bytes()
        assert raw[:4] == b"LXSH"
        assert np.frombuffer(raw[4:16], dtype="<u4").tolist() == [2, 5, 1]
        with pytest.raises(ValueError):
            (path.with_suffix(".bad")).write_bytes(b"XXXX" + raw[4:])
            read_shots(path.with_suffix(".bad"))
