"""Command-line surface tying the library together for batch use.

Seven subcommands compose into a pipeline over plain CSV files:

    simulate    draw a stationary series from one of the process models
    blockmax    reduce a series to componentwise block maxima
    estimate    minimum-distance dependence-function estimate from a series
    mc          replicated bias/variance/MSE sweep (config-file driven)
    table1      distances between the finite-block target and the limit
    check-rate  sup-norm check of the m * (C_(theta/m) - C_0) drift limit
    sandwich    two-sided block-copula bounds for the moving-max design

Every command accepts ``--seed`` and ``--out``.  Output is CSV on stdout
unless ``--out`` names a file; commands without randomness accept the seed
and ignore it.  The ``BLOCKMAX_SEED`` environment variable overrides
``--seed``, which overrides any config-file seed.  Exit codes: 0 success,
2 configuration error, 3 numeric failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from ._errors import ConfigError, NumericError
from .block_empirics import extract_block_maxima, maxima_to_csv
from .copulas import rate_check
from .monte_carlo import (
    ExperimentConfig,
    _format_value,
    config_from_items,
    csv_text,
    run_experiment,
    table1,
)
from .moving_maxima import MovingMaxConfig, closed_form_cm, sandwich_bounds
from .moving_maxima import simulate as simulate_moving_max
from .pickands import EstimatorConfig, estimate_pickands
from .random_repetition import simulate as simulate_repetition

__all__ = ["main", "build_parser"]

_SANDWICH_SLACK = -1e-12  # tolerated floating-point slack in the bounds


def _emit(text: str, out: str) -> None:
    """Write ``text`` to stdout (out == "-") or to the named file."""
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def _resolve_seed(args_seed: int | None, fallback: int = 0) -> int:
    """Precedence: BLOCKMAX_SEED env > --seed > fallback."""
    env = os.environ.get("BLOCKMAX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"BLOCKMAX_SEED must be an integer, got {env!r}") from exc
    return fallback if args_seed is None else int(args_seed)


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{flag} needs a comma-separated list, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad value in {flag}: {text!r} ({exc})") from exc


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{flag} needs a comma-separated list, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad value in {flag}: {text!r} ({exc})") from exc


def _read_series(path: str) -> np.ndarray:
    """Parse a series CSV: `#` comments skipped, one optional header row.

    Rows are comma-separated floats of equal length; anything else is a
    configuration error.
    """
    rows: list[list[float]] = []
    header_skipped = False
    for line in _read_text(path).splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split(",")
        try:
            row = [float(p) for p in parts]
        except ValueError:
            if rows or header_skipped:
                raise ConfigError(f"malformed series row {s!r} in {path}") from None
            header_skipped = True
            continue
        if rows and len(row) != len(rows[0]):
            raise ConfigError(f"ragged series row {s!r} in {path}")
        rows.append(row)
    if not rows:
        raise ConfigError(f"no data rows found in {path}")
    return np.asarray(rows, dtype=float)


def _series_text(path_values: np.ndarray, meta: dict) -> str:
    lines = [f"# {key}={_format_value(value)}" for key, value in meta.items()]
    lines.append(",".join(f"x{j + 1}" for j in range(path_values.shape[1])))
    for row in path_values:
        lines.append(",".join(f"{v:.16e}" for v in row))
    return "\n".join(lines) + "\n"


def _process_config(args) -> ExperimentConfig:
    """Map process flags onto the experiment config (its validation included)."""
    return ExperimentConfig(
        model=args.model, family=args.family, lambda_u=args.lambda_u,
        a=args.a, b=args.b, theta=args.theta, nu=args.nu, n_reps=2)


def _cmd_simulate(args) -> int:
    if args.n < 1:
        raise ConfigError(f"need n >= 1 observations, got {args.n}")
    config = _process_config(args)
    process = config.process()
    seed = _resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    if isinstance(process, MovingMaxConfig):
        path = simulate_moving_max(process, args.n, rng)
        extra = {"a": args.a, "b": args.b}
    else:
        path = simulate_repetition(process, args.n, rng)
        extra = {"theta": args.theta}
    meta = {"model": args.model, "family": args.family, "lambda_u": args.lambda_u}
    meta.update(extra)
    if args.family == "t":
        meta["nu"] = args.nu
    meta.update({"n": args.n, "seed": seed})
    _emit(_series_text(path, meta), args.out)
    return 0


def _cmd_blockmax(args) -> int:
    series = _read_series(args.in_path)
    maxima = extract_block_maxima(series, args.m)
    _emit(maxima_to_csv(maxima), args.out)
    return 0


def _cmd_estimate(args) -> int:
    series = _read_series(args.in_path)
    maxima = extract_block_maxima(series, args.m)
    if maxima.k < 2:
        raise ConfigError(
            f"need at least two blocks (n >= 2m): n={series.shape[0]}, m={args.m}")
    t_grid = (EstimatorConfig().t_grid if args.tgrid is None
              else _parse_float_list(args.tgrid, "--tgrid"))
    config = EstimatorConfig(
        kappa=args.kappa, gamma=args.gamma, divisor=args.divisor, t_grid=t_grid)
    if args.abc and not (0.0 in config.t_grid and 1.0 in config.t_grid):
        raise ConfigError(
            "the boundary correction needs t-grid endpoints 0 and 1; "
            "extend --tgrid or pass --no-abc")
    estimate = estimate_pickands(maxima, config, m=args.m)
    if not args.abc:
        estimate = replace(estimate, corrected=None)
    _emit(estimate.to_csv(), args.out)
    return 0


def _config_items_from_file(path: str) -> dict:
    items: dict = {}
    for line in _read_text(path).splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, value = s.partition("=")
        if not sep:
            raise ConfigError(f"config line must be key=value, got {s!r} in {path}")
        items[key.strip()] = value.strip()
    return items


def _cmd_mc(args) -> int:
    items = _config_items_from_file(args.config) if args.config else {}
    if args.seed is not None:
        items["master_seed"] = str(args.seed)
    config = config_from_items(items)
    summaries = run_experiment(config, jobs=args.jobs)
    meta = {
        "model": config.model, "family": config.family, "lambda_u": config.lambda_u,
        "a": config.a, "b": config.b, "theta": config.theta, "nu": config.nu,
        "mode": config.mode, "n_reps": config.n_reps,
        "master_seed": config.master_seed, "kappa": config.estimator.kappa,
        "gamma": config.estimator.gamma, "divisor": config.estimator.divisor,
    }
    _emit(csv_text(summaries, metadata=meta), args.out)
    return 0


def _cmd_table1(args) -> int:
    rows = table1(kappa=args.kappa)
    _emit(csv_text(rows, metadata={"kappa": args.kappa}), args.out)
    return 0


def _cmd_check_rate(args) -> int:
    m_list = _parse_int_list(args.m_list, "--m-list")
    if any(m2 <= m1 for m1, m2 in zip(m_list, m_list[1:])):
        raise ConfigError(f"--m-list must be strictly ascending, got {args.m_list!r}")
    report = rate_check(args.theta, args.beta, m_list, grid_size=args.grid_size)
    lines = [f"# theta={_format_value(args.theta)}",
             f"# beta={_format_value(args.beta)}",
             f"# grid_size={args.grid_size}",
             "m,sup_error"]
    lines += [f"{m},{err:.16e}" for m, err in report]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sandwich(args) -> int:
    m_list = _parse_int_list(args.m_list, "--m-list")
    config = _process_config(args)
    design = config.process()
    axis = np.linspace(0.0, 1.0, args.grid_size)
    uu, vv = np.meshgrid(axis, axis, indexing="ij")
    grid = np.stack([uu, vv], axis=-1).reshape(-1, 2)
    lines = [f"# family={args.family}",
             f"# lambda_u={_format_value(args.lambda_u)}",
             f"# a={_format_value(args.a)}", f"# b={_format_value(args.b)}",
             f"# grid_size={args.grid_size}",
             "m,min_lower_slack,min_upper_slack"]
    worst = 0.0
    for m in m_list:
        lower, upper = sandwich_bounds(design, m, grid)
        cm = closed_form_cm(design, m, grid)
        lo_slack = float(np.min(cm - lower))
        up_slack = float(np.min(upper - cm))
        worst = min(worst, lo_slack, up_slack)
        lines.append(f"{m},{lo_slack:.16e},{up_slack:.16e}")
    _emit("\n".join(lines) + "\n", args.out)
    if worst < _SANDWICH_SLACK:
        raise NumericError(
            f"sandwich bounds violated: worst slack {worst:.3e} < {_SANDWICH_SLACK:.0e}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None, metavar="INT",
        help="root seed (env BLOCKMAX_SEED overrides; ignored by "
             "commands without randomness; default 0)")
    parser.add_argument(
        "--out", default="-", metavar="PATH",
        help="output file (default: stdout)")


def _add_process_flags(parser: argparse.ArgumentParser, with_model: bool) -> None:
    if with_model:
        parser.add_argument(
            "--model", choices=("moving_max", "repetition"), default="moving_max",
            help="serial-dependence mechanism (default: moving_max)")
    else:
        parser.set_defaults(model="moving_max", theta=0.5)
    parser.add_argument(
        "--family", choices=("opc", "t", "gumbel"), default="opc",
        help="innovation copula family (default: opc)")
    parser.add_argument(
        "--lambda-u", dest="lambda_u", type=float, default=0.5, metavar="FLOAT",
        help="target upper tail-dependence coefficient in (0,1) (default: 0.5)")
    parser.add_argument(
        "--a", type=float, default=0.25, metavar="FLOAT",
        help="moving-max contemporaneous weight, first component (default: 0.25)")
    parser.add_argument(
        "--b", type=float, default=0.5, metavar="FLOAT",
        help="moving-max contemporaneous weight, second component (default: 0.5)")
    parser.add_argument(
        "--nu", type=float, default=4.0, metavar="FLOAT",
        help="degrees of freedom of the t innovation (default: 4)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockmax",
        description="Block-maxima estimation of extreme-value dependence: "
                    "simulate stationary series, extract block maxima, "
                    "estimate the Pickands dependence function, and run "
                    "replicated error sweeps.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "simulate", help="draw a stationary series from a process model",
        description="Simulate a bivariate stationary series (CSV, one row "
                    "per time point) from the moving-maximum or random-"
                    "repetition model.")
    _add_process_flags(p, with_model=True)
    p.add_argument("--theta", type=float, default=0.5, metavar="FLOAT",
                   help="repetition escape probability in (0,1] (default: 0.5)")
    p.add_argument("--n", type=int, default=1000, metavar="INT",
                   help="series length (default: 1000)")
    _add_common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser(
        "blockmax", help="reduce a series CSV to componentwise block maxima",
        description="Split a series into disjoint blocks of length m and "
                    "keep the componentwise maxima (k = floor(n/m) rows).")
    p.add_argument("--in", dest="in_path", required=True, metavar="PATH",
                   help="input series CSV (comments and one header row allowed)")
    p.add_argument("--m", type=int, required=True, metavar="INT",
                   help="block length")
    _add_common(p)
    p.set_defaults(handler=_cmd_blockmax)

    p = sub.add_parser(
        "estimate", help="estimate the Pickands dependence function",
        description="Block the input series, rank the maxima into pseudo-"
                    "observations, and evaluate the minimum-distance "
                    "estimate (with boundary correction by default) on a "
                    "t-grid.")
    p.add_argument("--in", dest="in_path", required=True, metavar="PATH",
                   help="input series CSV (feed a maxima CSV with --m 1)")
    p.add_argument("--m", type=int, required=True, metavar="INT",
                   help="block length (need n >= 2m)")
    p.add_argument("--kappa", type=float, default=0.5, metavar="FLOAT",
                   help="weight-family exponent (default: 0.5)")
    p.add_argument("--gamma", type=float, default=2.0 / 3.0, metavar="FLOAT",
                   help="truncation exponent (default: 2/3)")
    p.add_argument("--tgrid", default=None, metavar="LIST",
                   help="comma-separated evaluation points in [0,1] "
                        "(default: 0,0.05,...,1)")
    p.add_argument("--divisor", choices=("k", "k+1"), default="k",
                   help="rank scaling for pseudo-observations (default: k)")
    p.add_argument("--abc", action=argparse.BooleanOptionalAction, default=True,
                   help="apply the additive boundary correction pinning "
                        "A(0)=A(1)=1 (default: on)")
    _add_common(p)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser(
        "mc", help="run a replicated bias/variance/MSE sweep",
        description="Run the simulate-block-estimate pipeline N times per "
                    "sweep cell and summarize summed bias, variance, and "
                    "MSE against the limit dependence function.  The sweep "
                    "is described by a flat key=value config file.")
    p.add_argument("--config", default=None, metavar="PATH",
                   help="key=value config file (defaults apply when omitted)")
    p.add_argument("--jobs", type=int, default=1, metavar="INT",
                   help="worker processes; results are identical for any "
                        "value (default: 1)")
    _add_common(p)
    p.set_defaults(handler=_cmd_mc)

    p = sub.add_parser(
        "table1", help="distances between finite-block target and limit",
        description="For each innovation family (opc, t) and tail-"
                    "dependence level (0.25, 0.5, 0.75), compute the root-"
                    "mean-square gap over the t-grid between the block-"
                    "length-one target dependence function and the limit.")
    p.add_argument("--kappa", type=float, default=0.5, metavar="FLOAT",
                   help="weight-family exponent (default: 0.5)")
    _add_common(p)
    p.set_defaults(handler=_cmd_table1)

    p = sub.add_parser(
        "check-rate", help="sup-norm check of the drift-term limit",
        description="Report sup over a square grid of |m{C_(theta/m,beta) "
                    "- C_(0,beta)} - theta*Gamma_beta| for each m; the "
                    "errors shrink like 1/m.")
    p.add_argument("--theta", type=float, default=1.0, metavar="FLOAT",
                   help="outer-power Clayton rate parameter (default: 1)")
    p.add_argument("--beta", type=float, default=2.0, metavar="FLOAT",
                   help="outer-power / limit shape parameter (default: 2)")
    p.add_argument("--m-list", default="1000,2000", metavar="LIST",
                   help="strictly ascending comma-separated block lengths "
                        "(default: 1000,2000)")
    p.add_argument("--grid-size", type=int, default=21, metavar="INT",
                   help="points per axis of the evaluation grid (default: 21)")
    _add_common(p)
    p.set_defaults(handler=_cmd_check_rate)

    p = sub.add_parser(
        "sandwich", help="verify two-sided bounds on the block-maxima copula",
        description="For the two-lag moving-max design, check the closed-"
                    "form block-maxima copula against its two-sided bounds "
                    "on a square grid; reports the minimum slack per block "
                    "length and fails (exit 3) on violation.")
    _add_process_flags(p, with_model=False)
    p.add_argument("--m-list", default="2,5,10,50", metavar="LIST",
                   help="comma-separated block lengths, each > 1 "
                        "(default: 2,5,10,50)")
    p.add_argument("--grid-size", type=int, default=21, metavar="INT",
                   help="points per axis of the evaluation grid (default: 21)")
    _add_common(p)
    p.set_defaults(handler=_cmd_sandwich)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"blockmax: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"blockmax: numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"blockmax: i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
