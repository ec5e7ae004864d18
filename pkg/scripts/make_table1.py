#!/usr/bin/env python3
"""Distance table between the finite-block target and the limit.

For each innovation family (outer-power Clayton, t) and upper tail-
dependence level (0.25, 0.5, 0.75), computes the root-mean-square gap on
the evaluation grid between the block-length-one target dependence
function A_1* of the two-lag moving-max design and the limit A_inf.
Quantifies the bias floor any estimator based on single-observation
"blocks" inherits.  Runs in a few seconds.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from blockmax.monte_carlo import table1, write_csv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kappa", type=float, default=0.5,
                        help="weight-family exponent (default 0.5)")
    parser.add_argument("--out", default="results/table1.csv")
    args = parser.parse_args(argv)

    rows = table1(kappa=args.kappa)
    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, args.out, metadata={"kappa": args.kappa})
    for row in rows:
        print(f"{row.family:>4}  lambda_U={row.lambda_u:4.2f}  "
              f"distance={row.distance:.6e}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
