#!/usr/bin/env python3
"""Fixed-block-length sweep: estimation error vs number of blocks k.

Holds m fixed (a month, say) and sweeps the number of blocks for several
tail-dependence levels, stacking one labelled row group per level into a
single CSV — the input for the plotting frontend's fixed_m_mse figure
(one curve per `# lambda_u=` group).

Desk-scale defaults finish in minutes; pass --full for the study-scale
grid (k = 12, 24, ..., 240, 1000 replications).
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from blockmax.monte_carlo import ExperimentConfig, run_experiment, write_csv

DESK_K_LIST = (12, 24, 48, 96, 240)
FULL_K_LIST = tuple(range(12, 241, 12))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=("opc", "t", "gumbel"), default="opc")
    parser.add_argument("--lambdas", default="0.25,0.5,0.75",
                        help="comma-separated tail-dependence levels, one curve each")
    parser.add_argument("--m", type=int, default=30)
    parser.add_argument("--reps", type=int, default=100,
                        help="replications per cell (default 100; study scale 1000)")
    parser.add_argument("--full", action="store_true",
                        help="sweep k = 12, 24, ..., 240 instead of the desk subset")
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--seed", type=int, default=20240)
    parser.add_argument("--out", default="results/fixed_m.csv")
    args = parser.parse_args(argv)

    lambdas = tuple(float(s) for s in args.lambdas.split(",") if s.strip())
    groups = []
    for lam in lambdas:
        config = ExperimentConfig(
            model="moving_max", family=args.family, lambda_u=lam,
            mode="fixed_m", m=args.m,
            k_list=FULL_K_LIST if args.full else DESK_K_LIST,
            n_reps=args.reps, master_seed=args.seed)
        groups.append(({"lambda_u": lam}, run_experiment(config, jobs=args.jobs)))
        print(f"lambda_u={lam}: {len(groups[-1][1])} cells done")
    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(groups, args.out, metadata={
        "mode": "fixed_m", "model": "moving_max", "family": args.family,
        "m": args.m, "n_reps": args.reps, "master_seed": args.seed})
    print(f"wrote {sum(len(g[1]) for g in groups)} cells to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
