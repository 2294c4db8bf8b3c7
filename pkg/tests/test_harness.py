"""Campaign harness tests: normalization, crossing scans, result IO."""

import hashlib
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacross.harness import (
    ExperimentConfig,
    ResultRow,
    _implied_rounds,
    _result_row,
    build_experiment_circuit,
    circuit_content_hash,
    loglog_slope,
    normalize_per_round,
    read_rows_csv,
    run_experiment,
    threshold_scan,
    write_manifest,
    write_rows_csv,
)


def synth_row(p, per_round, rounds=1, shots=10**6):
    """Row with exact per-round rate; p_l kept consistent for resampling."""
    p_l = 1.0 - (1.0 - per_round) ** rounds
    failures = int(round(p_l * shots))
    return ResultRow(
        p=p, shots=shots, failures=failures, p_l=p_l, per_round=per_round, stderr=0.0
    )


class TestNormalize:
    def test_reference_value(self):
        assert normalize_per_round(0.04, 4) == pytest.approx(
            0.01015359923204695, abs=1e-15
        )

    def test_single_round_is_identity(self):
        assert normalize_per_round(0.3, 1) == pytest.approx(0.3, abs=1e-15)

    def test_zero_maps_to_zero(self):
        assert normalize_per_round(0.0, 7) == 0.0

    @pytest.mark.parametrize("p_l,rounds", [(-0.1, 2), (1.0, 2), (1.5, 2), (0.1, 0)])
    def test_rejects_out_of_range(self, p_l, rounds):
        with pytest.raises(ValueError):
            normalize_per_round(p_l, rounds)

    @given(
        x=st.floats(min_value=1e-9, max_value=0.5),
        rounds=st.integers(min_value=1, max_value=24),
    )
    @settings(max_examples=80, deadline=None)
    def test_inverts_round_accumulation(self, x, rounds):
        accumulated = 1.0 - (1.0 - x) ** rounds
        assert normalize_per_round(accumulated, rounds) == pytest.approx(x, rel=1e-9)

    def test_monotone_in_accumulated_rate(self):
        grid = np.linspace(0.0, 0.9, 40)
        vals = [normalize_per_round(v, 5) for v in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestStderr:
    def test_single_round_matches_binomial(self):
        row = _result_row(p=1e-3, shots=4000, failures=37, rounds=1)
        sd = math.sqrt(row.p_l * (1.0 - row.p_l) / 4000)
        assert row.stderr == pytest.approx(sd, rel=1e-12)

    def test_matches_numeric_derivative(self):
        # Delta method: stderr should equal sd(p_l) times the slope of the
        # normalization at the observed p_l.
        row = _result_row(p=1e-3, shots=5000, failures=220, rounds=4)
        sd = math.sqrt(row.p_l * (1.0 - row.p_l) / 5000)
        h = 1e-7
        slope = (
            normalize_per_round(row.p_l + h, 4) - normalize_per_round(row.p_l - h, 4)
        ) / (2 * h)
        assert row.stderr == pytest.approx(sd * slope, rel=1e-6)

    def test_zero_failures_gives_zero_spread(self):
        row = _result_row(p=1e-3, shots=100, failures=0, rounds=3)
        assert row.per_round == 0.0
        assert row.stderr == 0.0


@pytest.fixture(scope="module")
def small_run():
    config = ExperimentConfig(
        n=4, k=2, experiment="memory", ps=(2e-3, 6e-3), shots=400, seed=9
    )
    return config, run_experiment(config)


class TestCampaign:
    def test_rows_cover_every_point(self, small_run):
        config, rows = small_run
        assert [r.p for r in rows] == list(config.ps)
        assert all(r.shots == config.shots for r in rows)

    def test_row_fields_are_consistent(self, small_run):
        config, rows = small_run
        _, rounds = build_experiment_circuit(config)
        for row in rows:
            assert row.p_l == row.failures / row.shots
            assert row.per_round == pytest.approx(
                normalize_per_round(row.p_l, rounds), abs=1e-15
            )

    def test_rerun_is_bit_identical(self, small_run):
        config, rows = small_run
        assert run_experiment(config) == rows

    def test_default_rounds_equal_distance(self):
        config = ExperimentConfig(n=4, k=2, experiment="memory", ps=(1e-3,), shots=1)
        _, rounds = build_experiment_circuit(config)
        assert rounds == 2

    def test_gadget_experiment_needs_two_rounds(self):
        config = ExperimentConfig(n=4, k=2, experiment="hadamard", ps=(1e-3,), shots=1)
        _, rounds = build_experiment_circuit(config)
        assert rounds >= 2

    def test_failure_provenance_names_the_stage(self, tmp_path):
        bad = ExperimentConfig(n=4, k=0, experiment="memory", ps=(1e-3,), shots=1)
        with pytest.raises(RuntimeError, match="code construction failed"):
            build_experiment_circuit(bad)
        missing = ExperimentConfig(
            n=4, k=2, experiment=str(tmp_path / "absent.json"), ps=(1e-3,), shots=1
        )
        with pytest.raises(RuntimeError, match="circuit assembly failed"):
            build_experiment_circuit(missing)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"ps": ()},
            {"ps": (0.0,)},
            {"ps": (0.2,)},
            {"shots": 0},
            {"rounds": 0},
        ],
    )
    def test_config_validation(self, kwargs):
        base = dict(n=4, k=2, experiment="memory", ps=(1e-3,), shots=10)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ExperimentConfig(**base)


class TestSlope:
    def test_recovers_power_law_exponent(self):
        rows = [synth_row(p, 30.0 * p**2) for p in (1e-3, 2e-3, 4e-3, 8e-3)]
        assert loglog_slope(rows) == pytest.approx(2.0, abs=1e-9)

    def test_needs_two_nonzero_points(self):
        rows = [synth_row(1e-3, 0.0), synth_row(2e-3, 1e-4)]
        with pytest.raises(ValueError):
            loglog_slope(rows)


class TestThresholdScan:
    def make_pair(self, ps, cross_at):
        # Slope-1 versus slope-2 power laws meeting exactly at cross_at.
        shallow = [synth_row(p, 0.3 * p) for p in ps]
        steep = [synth_row(p, (0.3 / cross_at) * p**2) for p in ps]
        return {"shallow": shallow, "steep": steep}

    def test_exact_crossing_recovered(self):
        ps = (2e-3, 4e-3, 8e-3)
        curves = self.make_pair(ps, cross_at=4e-3)
        est = threshold_scan(curves, bootstrap=200, seed=1)
        assert est.status == "ok"
        assert est.p_th == pytest.approx(4e-3, rel=1e-9)
        assert est.ci_low <= est.p_th <= est.ci_high
        assert est.bootstrap_samples > 0

    def test_interior_crossing_between_grid_points(self):
        ps = (2e-3, 8e-3)
        curves = self.make_pair(ps, cross_at=5e-3)
        est = threshold_scan(curves, bootstrap=50, seed=1)
        assert est.status == "ok"
        assert est.p_th == pytest.approx(5e-3, rel=1e-9)

    def test_parallel_curves_are_unbounded(self):
        ps = (2e-3, 4e-3, 8e-3)
        curves = {
            "low": [synth_row(p, 0.1 * p) for p in ps],
            "high": [synth_row(p, 0.4 * p) for p in ps],
        }
        est = threshold_scan(curves, bootstrap=10)
        assert est.status == "unbounded"
        assert est.p_th is None

    def test_identical_curves_are_degenerate(self):
        ps = (2e-3, 4e-3)
        rows = [synth_row(p, 0.2 * p) for p in ps]
        est = threshold_scan({"a": rows, "b": list(rows)}, bootstrap=10)
        assert est.status == "degenerate"

    def test_rejects_mismatched_grids(self):
        a = [synth_row(p, 0.1 * p) for p in (1e-3, 2e-3)]
        b = [synth_row(p, 0.2 * p) for p in (1e-3, 3e-3)]
        with pytest.raises(ValueError, match="share the physical error grid"):
            threshold_scan({"a": a, "b": b})

    def test_rejects_single_curve(self):
        a = [synth_row(p, 0.1 * p) for p in (1e-3, 2e-3)]
        with pytest.raises(ValueError, match="at least two"):
            threshold_scan({"a": a})

    def test_three_curve_estimate_pools_pairs(self):
        ps = (2e-3, 4e-3, 8e-3)
        curves = {
            "d2": [synth_row(p, 0.3 * p) for p in ps],
            "d3": [synth_row(p, (0.3 / 4e-3) * p**2) for p in ps],
            "d4": [synth_row(p, (0.3 / (4e-3) ** 2) * p**3) for p in ps],
        }
        est = threshold_scan(curves, bootstrap=30, seed=2)
        assert est.status == "ok"
        assert len(est.crossings) == 3
        assert est.p_th == pytest.approx(4e-3, rel=1e-9)

    @pytest.mark.parametrize("rounds", [1, 2, 4, 7])
    def test_implied_rounds_inverts_normalization(self, rounds):
        row = synth_row(3e-3, 0.012, rounds=rounds)
        assert _implied_rounds(row) == rounds


class TestResultIO:
    def make_rows(self):
        return [
            _result_row(p=1e-3, shots=1000, failures=3, rounds=2),
            _result_row(p=7e-3, shots=1000, failures=41, rounds=2),
        ]

    def test_csv_round_trip(self, tmp_path):
        rows = self.make_rows()
        path = tmp_path / "rows.csv"
        write_rows_csv(path, rows)
        assert read_rows_csv(path) == rows

    def test_csv_header_is_pinned(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_rows_csv(path, self.make_rows())
        header = path.read_text().splitlines()[0]
        assert header == "p,shots,failures,p_L,P_L,stderr"

    def test_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "rows.csv"
        path.write_text("p,shots,fails\n")
        with pytest.raises(ValueError, match="unexpected header"):
            read_rows_csv(path)

    def test_manifest_contents(self, tmp_path):
        import json

        config = ExperimentConfig(
            n=4, k=2, experiment="memory", ps=(1e-3,), shots=10, seed=5
        )
        circuit, _ = build_experiment_circuit(config)
        rows = self.make_rows()
        path = tmp_path / "manifest.json"
        write_manifest(path, config, circuit, rows)
        payload = json.loads(path.read_text())
        assert sorted(payload) == [
            "circuit_sha1",
            "config",
            "point_batch_stride",
            "rows",
            "seed",
        ]
        assert payload["seed"] == 5
        assert payload["point_batch_stride"] == 1 << 32
        assert payload["circuit_sha1"] == circuit_content_hash(circuit)
        assert payload["rows"][0]["failures"] == 3
        assert payload["config"]["decoder"]["min_sum_scale"] == 0.3

    def test_content_hash_is_blob_style(self):
        config = ExperimentConfig(n=4, k=2, experiment="memory", ps=(1e-3,), shots=1)
        circuit, _ = build_experiment_circuit(config)
        text = circuit.to_text().encode()
        expected = hashlib.sha1(b"blob %d\x00" % len(text) + text).hexdigest()
        assert circuit_content_hash(circuit) == expected
