#!/usr/bin/env python3
"""Threshold estimate from per-round curve crossings of a code family."""

import argparse
import json
from pathlib import Path

from lacross.bposd import DecodeConfig
from lacross.harness import (
    ExperimentConfig,
    run_experiment,
    threshold_scan,
    write_rows_csv,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--code",
        action="append",
        dest="codes",
        default=None,
        help="n,k pair per flag; default 6,2 and 8,2",
    )
    parser.add_argument("--experiment", default="memory")
    parser.add_argument(
        "--p", type=float, nargs="+", default=[3e-3, 4e-3, 5e-3, 6e-3, 7e-3]
    )
    parser.add_argument("--shots", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--bootstrap", type=int, default=300)
    parser.add_argument("--out-dir", default=".")
    args = parser.parse_args()

    codes = [tuple(int(t) for t in c.split(",")) for c in (args.codes or ["6,2", "8,2"])]
    scale = 0.3 if args.experiment == "memory" else 0.2
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    curves = {}
    for n, k in codes:
        config = ExperimentConfig(
            n=n,
            k=k,
            experiment=args.experiment,
            ps=tuple(args.p),
            shots=args.shots,
            seed=args.seed,
            decoder=DecodeConfig(min_sum_scale=scale),
        )
        rows = run_experiment(config)
        label = f"n{n}k{k}"
        curves[label] = rows
        write_rows_csv(out / f"{label}.csv", rows)
        print(label, " ".join(f"{r.per_round:.3e}" for r in rows))

    estimate = threshold_scan(curves, bootstrap=args.bootstrap, seed=args.seed)
    if estimate.status == "ok":
        print(
            f"threshold {estimate.p_th:.4%} "
            f"[{estimate.ci_low:.4%}, {estimate.ci_high:.4%}] "
            f"from {len(estimate.crossings)} pair crossing(s)"
        )
    else:
        print(f"threshold estimate: {estimate.status}")
    (out / "threshold.json").write_text(
        json.dumps(
            {
                "status": estimate.status,
                "p_th": estimate.p_th,
                "ci_low": estimate.ci_low,
                "ci_high": estimate.ci_high,
                "codes": codes,
                "experiment": args.experiment,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {out / 'threshold.json'}")


if __name__ == "__main__":
    main()
