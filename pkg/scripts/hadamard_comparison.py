#!/usr/bin/env python3
"""Teleported-Hadamard overhead: gadget versus plain memory on one code.

Runs both experiments over a shared grid of physical error rates and prints
the per-round logical error rates side by side with their ratio.
"""

import argparse
from pathlib import Path

from lacross.bposd import DecodeConfig
from lacross.harness import (
    ExperimentConfig,
    loglog_slope,
    run_experiment,
    write_rows_csv,
)


def campaign(args, experiment, scale):
    config = ExperimentConfig(
        n=args.n,
        k=args.k,
        experiment=experiment,
        ps=tuple(args.p),
        shots=args.shots,
        seed=args.seed,
        decoder=DecodeConfig(min_sum_scale=scale),
    )
    return run_experiment(config)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument(
        "--p", type=float, nargs="+", default=[2e-3, 3e-3, 4e-3, 5e-3]
    )
    parser.add_argument("--shots", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default=".")
    args = parser.parse_args()

    memory = campaign(args, "memory", 0.3)
    hadamard = campaign(args, "hadamard", 0.2)

    print(f"{'p':>8}  {'memory P_L':>12}  {'hadamard P_L':>12}  {'ratio':>6}")
    for mem, had in zip(memory, hadamard):
        ratio = had.per_round / mem.per_round if mem.per_round else float("inf")
        print(
            f"{mem.p:>8g}  {mem.per_round:>12.3e}  {had.per_round:>12.3e}  "
            f"{ratio:>6.2f}"
        )
    try:
        print(
            f"slopes: memory {loglog_slope(memory):.2f}  "
            f"hadamard {loglog_slope(hadamard):.2f}"
        )
    except ValueError:
        pass

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows_csv(out / "memory.csv", memory)
    write_rows_csv(out / "hadamard.csv", hadamard)
    print(f"wrote {out / 'memory.csv'} and {out / 'hadamard.csv'}")


if __name__ == "__main__":
    main()
