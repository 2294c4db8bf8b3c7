"""Experiment orchestration: Monte Carlo campaigns and threshold scans.

A campaign builds one experiment circuit, then for each physical error rate
extracts the error model, samples detector/observable flips in keyed batches,
and decodes them.  Results are per-round normalized with delta-method error
bars.  Threshold estimates come from pairwise log-log curve crossings with a
bootstrap confidence interval over shot resampling.

Reproducibility: batches draw from counter-based streams keyed by the
campaign seed and a per-point batch offset, so identical configurations give
bit-identical rows regardless of how work is chunked.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bposd import DecodeConfig, TannerGraph, decode_batch
from .builders import (
    build_generic_gadget,
    build_hadamard_gadget,
    build_memory_experiment,
)
from .circuit import Circuit, NoiseModel
from .codes import build_lacross
from .dem import extract_dem
from .frames import FrameSampler

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ThresholdEstimate",
    "normalize_per_round",
    "build_experiment_circuit",
    "run_experiment",
    "threshold_scan",
    "loglog_slope",
    "write_rows_csv",
    "read_rows_csv",
    "write_manifest",
    "circuit_content_hash",
]

# Batch indices of consecutive points are offset by this stride, keeping the
# counter-based streams of different points disjoint for any realistic count.
_POINT_STRIDE = 1 << 32

_EXPERIMENTS = ("memory", "hadamard")


@dataclass
class ExperimentConfig:
    """One campaign: a code, an experiment kind, and a sweep over p."""

    n: int
    k: int
    experiment: str = "memory"
    ps: tuple[float, ...] = (1e-3,)
    shots: int = 10_000
    rounds: int | None = None
    seed: int = 0
    decoder: DecodeConfig = field(default_factory=DecodeConfig)

    def __post_init__(self) -> None:
        self.ps = tuple(float(p) for p in self.ps)
        if not self.ps:
            raise ValueError("at least one physical error rate is required")
        if any(not 0.0 < p <= 0.1 for p in self.ps):
            raise ValueError("physical error rates must lie in (0, 0.1]")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.rounds is not None and self.rounds < 1:
            raise ValueError("rounds must be at least 1")


@dataclass(frozen=True)
class ResultRow:
    """One decoded point: raw failure rate plus per-round normalization."""

    p: float
    shots: int
    failures: int
    p_l: float
    per_round: float
    stderr: float


@dataclass(frozen=True)
class ThresholdEstimate:
    """Crossing estimate for a distance family.

    status is "ok" (p_th and the confidence interval are set), "unbounded"
    (no curve pair crosses in the scanned range), or "degenerate" (curves
    coincide and every point is a crossing).
    """

    status: str
    p_th: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    crossings: tuple[float, ...] = ()
    bootstrap_samples: int = 0


def normalize_per_round(p_l: float, rounds: int) -> float:
    """Per-round failure probability: 1 - (1 - p_l)^(1/rounds)."""
    if not 0.0 <= p_l < 1.0:
        raise ValueError("p_l must lie in [0, 1)")
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    return 1.0 - (1.0 - p_l) ** (1.0 / rounds)


def _stderr_per_round(p_l: float, shots: int, rounds: int) -> float:
    # Binomial standard deviation pushed through the normalization via its
    # derivative at the estimate (delta method).
    sd = math.sqrt(p_l * (1.0 - p_l) / shots)
    return sd * (1.0 - p_l) ** (1.0 / rounds - 1.0) / rounds


def _result_row(p: float, shots: int, failures: int, rounds: int) -> ResultRow:
    p_l = failures / shots
    return ResultRow(
        p=p,
        shots=shots,
        failures=failures,
        p_l=p_l,
        per_round=normalize_per_round(p_l, rounds),
        stderr=_stderr_per_round(p_l, shots, rounds),
    )


def build_experiment_circuit(config: ExperimentConfig) -> tuple[Circuit, int]:
    """Ideal experiment circuit plus the round count used for normalization."""
    try:
        code = build_lacross(config.n, config.k)
    except Exception as exc:
        raise RuntimeError(f"code construction failed: {exc}") from exc
    rounds = config.rounds if config.rounds is not None else code.distance
    try:
        if config.experiment == "memory":
            circuit = build_memory_experiment(code, rounds)
        elif config.experiment == "hadamard":
            circuit, _ = build_hadamard_gadget(code, rounds=rounds)
        else:
            plan = json.loads(Path(config.experiment).read_text())
            x_pair = tuple(plan["x_pair"])
            z_pair = tuple(plan.get("z_pair", x_pair))
            circuit, _ = build_generic_gadget(
                code, x_pair=x_pair, z_pair=z_pair, rounds=rounds
            )
    except RuntimeError:
        raise
    except Exception as exc:
        raise RuntimeError(f"circuit assembly failed: {exc}") from exc
    return circuit, rounds


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Sample and decode every configured point; rows keep raw counts."""
    ideal, rounds = build_experiment_circuit(config)
    rows = []
    for index, p in enumerate(config.ps):
        noisy = NoiseModel.uniform(p).apply(ideal)
        try:
            graph = TannerGraph(extract_dem(noisy))
        except Exception as exc:
            raise RuntimeError(f"error model extraction failed: {exc}") from exc
        sampler = FrameSampler(noisy)
        cache: dict[bytes, tuple[int, bool]] = {}
        failures = 0
        done = 0
        batch = 0
        while done < config.shots:
            det, obs = sampler.sample_batch(config.seed, index * _POINT_STRIDE + batch)
            take = min(det.shape[0], config.shots - done)
            predicted, _ = decode_batch(graph, det[:take], config.decoder, cache)
            failures += int((predicted ^ obs[:take]).any(axis=1).sum())
            done += take
            batch += 1
        rows.append(_result_row(p, config.shots, failures, rounds))
    return rows


def loglog_slope(rows: list[ResultRow]) -> float:
    """Least-squares slope of ln(per-round rate) against ln(p)."""
    pts = [(math.log(r.p), math.log(r.per_round)) for r in rows if r.per_round > 0]
    if len(pts) < 2:
        raise ValueError("need at least two points with nonzero failure rate")
    xs = np.array([x for x, _ in pts])
    ys = np.array([y for _, y in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def _pair_crossing(ps, rate_a, rate_b):
    """Crossing of two curves in log-log space, or the reason there is none.

    Returns (kind, value): ("ok", p_cross), ("degenerate", None) when the
    curves coincide at every usable point, or ("none", None).
    """
    xs, diff = [], []
    for p, a, b in zip(ps, rate_a, rate_b):
        if a > 0.0 and b > 0.0:
            xs.append(math.log(p))
            diff.append(math.log(a) - math.log(b))
    if len(xs) < 2:
        return "none", None
    if all(abs(d) < 1e-12 for d in diff):
        return "degenerate", None
    for j in range(len(xs) - 1):
        d0, d1 = diff[j], diff[j + 1]
        if d0 == 0.0:
            return "ok", math.exp(xs[j])
        if d0 * d1 < 0.0:
            t = d0 / (d0 - d1)
            return "ok", math.exp(xs[j] + t * (xs[j + 1] - xs[j]))
    if diff[-1] == 0.0:
        return "ok", math.exp(xs[-1])
    return "none", None


def _scan_once(ps, curves):
    crossings = []
    degenerate = 0
    pairs = 0
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            pairs += 1
            kind, value = _pair_crossing(ps, curves[i], curves[j])
            if kind == "ok":
                crossings.append(value)
            elif kind == "degenerate":
                degenerate += 1
    if degenerate == pairs:
        return "degenerate", []
    if not crossings:
        return "unbounded", []
    return "ok", crossings


def threshold_scan(
    curves: dict[str, list[ResultRow]],
    bootstrap: int = 500,
    seed: int = 0,
) -> ThresholdEstimate:
    """Family crossing estimate: log-log interpolation plus bootstrap CI.

    All curves must share one p grid.  The point estimate is the geometric
    mean of the pairwise crossings; the interval is the 2.5/97.5 percentile
    span of that estimate over binomial shot resampling.
    """
    if len(curves) < 2:
        raise ValueError("need at least two distance curves")
    rows_by_label = list(curves.values())
    ps = [r.p for r in rows_by_label[0]]
    for rows in rows_by_label[1:]:
        if [r.p for r in rows] != ps:
            raise ValueError("curves must share the physical error grid")
    rounds_inferred = [
        [_implied_rounds(r) for r in rows] for rows in rows_by_label
    ]

    rates = [[r.per_round for r in rows] for rows in rows_by_label]
    status, crossings = _scan_once(ps, rates)
    if status != "ok":
        return ThresholdEstimate(status=status)
    estimate = _geometric_mean(crossings)

    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    samples = []
    for _ in range(bootstrap):
        resampled = []
        for rows, rounds_row in zip(rows_by_label, rounds_inferred):
            rerates = []
            for row, rounds in zip(rows, rounds_row):
                fails = rng.binomial(row.shots, row.p_l)
                rerates.append(normalize_per_round(fails / row.shots, rounds))
            resampled.append(rerates)
        st, cr = _scan_once(ps, resampled)
        if st == "ok":
            samples.append(_geometric_mean(cr))
    if samples:
        lo, hi = np.percentile(samples, [2.5, 97.5])
    else:
        lo = hi = estimate
    return ThresholdEstimate(
        status="ok",
        p_th=estimate,
        ci_low=float(lo),
        ci_high=float(hi),
        crossings=tuple(crossings),
        bootstrap_samples=len(samples),
    )


def _geometric_mean(values):
    return math.exp(sum(math.log(v) for v in values) / len(values))


def _implied_rounds(row: ResultRow) -> int:
    # Invert the normalization so bootstrap resamples reuse the row's rounds.
    if row.p_l <= 0.0 or row.per_round <= 0.0:
        return 1
    est = math.log(1.0 - row.p_l) / math.log(1.0 - row.per_round)
    return max(1, round(est))


def write_rows_csv(path, rows: list[ResultRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("p,shots,failures,p_L,P_L,stderr\n")
        for r in rows:
            fh.write(
                f"{r.p!r},{r.shots},{r.failures},{r.p_l!r},{r.per_round!r},{r.stderr!r}\n"
            )


def read_rows_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "p,shots,failures,p_L,P_L,stderr":
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            p, shots, failures, p_l, per_round, stderr = line.split(",")
            rows.append(
                ResultRow(
                    p=float(p),
                    shots=int(shots),
                    failures=int(failures),
                    p_l=float(p_l),
                    per_round=float(per_round),
                    stderr=float(stderr),
                )
            )
    return rows


def circuit_content_hash(circuit: Circuit) -> str:
    """Content address of the circuit text, blob-style."""
    blob = circuit.to_text().encode()
    return hashlib.sha1(b"blob %d\x00" % len(blob) + blob).hexdigest()


def write_manifest(path, config: ExperimentConfig, circuit: Circuit, rows) -> None:
    payload = {
        "config": asdict(config),
        "seed": config.seed,
        "point_batch_stride": _POINT_STRIDE,
        "circuit_sha1": circuit_content_hash(circuit),
        "rows": [asdict(r) for r in rows],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
