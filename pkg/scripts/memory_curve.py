#!/usr/bin/env python3
"""Memory logical-error curve for one code, with the fitted log-log slope."""

import argparse
from pathlib import Path

from lacross.bposd import DecodeConfig
from lacross.harness import (
    ExperimentConfig,
    loglog_slope,
    run_experiment,
    write_rows_csv,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument(
        "--p", type=float, nargs="+", default=[1e-3, 2e-3, 3e-3]
    )
    parser.add_argument("--shots", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="memory_curve.csv")
    args = parser.parse_args()

    config = ExperimentConfig(
        n=args.n,
        k=args.k,
        experiment="memory",
        ps=tuple(args.p),
        shots=args.shots,
        seed=args.seed,
        decoder=DecodeConfig(min_sum_scale=0.3),
    )
    rows = run_experiment(config)
    for row in rows:
        print(
            f"p={row.p:g}  failures={row.failures}/{row.shots}  "
            f"P_L={row.per_round:.3e} +/- {row.stderr:.1e}"
        )
    try:
        print(f"log-log slope: {loglog_slope(rows):.3f}")
    except ValueError:
        print("log-log slope: needs two points with failures")
    write_rows_csv(Path(args.out), rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
