"""Monte Carlo harness: replicated pipeline runs and their summaries.

One experiment sweeps a list of cells — block lengths m at fixed series
length n, or block counts k at fixed m — and, per cell, repeats
simulate -> block maxima -> boundary-corrected dependence-function estimate
N times.  Summaries follow the summed-error convention on the interior of
the t-grid:

    B_sum   = sum_j (mean_rep A_hat(t_j) - A_inf(t_j))^2,
    Var_sum = sum_j var_rep A_hat(t_j)          (sample variance, N - 1),
    MSE_sum = B_sum + Var_sum,

with t_j running over grid points strictly inside (0, 1).  Replication
seeds are spawned as SeedSequence((master_seed, m, k, rep_index)), so any
worker count yields bit-identical results; aggregation order is fixed by
rep index, never by completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Mapping, Sequence

import numpy as np

from ._errors import ConfigError, NumericError
from .block_empirics import extract_block_maxima
from .copulas import CopulaSpec, gumbel_pickands, t_ev_pickands, tdc_to_param
from .moving_maxima import MovingMaxConfig, two_lag_design
from .moving_maxima import closed_form_c1
from .moving_maxima import simulate as simulate_moving_max
from .pickands import EstimatorConfig, a1_star, estimate_pickands
from .random_repetition import RepetitionConfig
from .random_repetition import simulate as simulate_repetition

__all__ = [
    "ExperimentConfig",
    "Cell",
    "McSummary",
    "Table1Row",
    "run_replication",
    "run_experiment",
    "table1",
    "csv_text",
    "write_csv",
    "read_summary_csv",
    "read_table_csv",
    "config_from_items",
]

_MODELS = ("moving_max", "repetition")
_FAMILIES = ("opc", "t", "gumbel")
_MODES = ("fixed_n", "fixed_m")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one sweep of the simulation study.

    Attributes:
        model: process generating serial dependence, "moving_max" (two-lag
            design with weights a, b) or "repetition" (escape probability
            theta).
        family: innovation copula family, "opc", "t", or "gumbel".
        lambda_u: upper tail-dependence coefficient targeted by the
            innovation parameter (beta for opc/gumbel, rho for t).
        a, b: contemporaneous weights of the two-lag moving-max design.
        theta: escape probability of the repetition model.
        nu: degrees of freedom of the t innovation.
        mode: sweep kind; "fixed_n" holds the series length fixed and sweeps
            block lengths m_list, "fixed_m" holds the block length fixed and
            sweeps block counts k_list (series length n = m * k per cell).
        n: series length for fixed_n mode.
        m_list: block lengths for fixed_n mode.
        m: block length for fixed_m mode.
        k_list: block counts for fixed_m mode.
        n_reps: replications per cell (N >= 2; variance needs it).
        estimator: estimator tuning; the t-grid must contain both endpoints
            (the boundary correction is part of the pipeline).
        master_seed: root of the replication seed tree.
    """

    model: str = "moving_max"
    family: str = "opc"
    lambda_u: float = 0.5
    a: float = 0.25
    b: float = 0.5
    theta: float = 0.5
    nu: float = 4.0
    mode: str = "fixed_n"
    n: int = 1000
    m_list: tuple[int, ...] = tuple(range(1, 31))
    m: int = 30
    k_list: tuple[int, ...] = (12, 24, 48, 96, 240)
    n_reps: int = 1000
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    master_seed: int = 20240

    def __post_init__(self) -> None:
        if self.model not in _MODELS:
            raise ConfigError(f"model must be one of {_MODELS}, got {self.model!r}")
        if self.family not in _FAMILIES:
            raise ConfigError(f"family must be one of {_FAMILIES}, got {self.family!r}")
        if not 0.0 < self.lambda_u < 1.0:
            raise ConfigError(f"lambda_u must lie in (0, 1), got {self.lambda_u}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode}")
        if self.n_reps < 2:
            raise ConfigError(f"need n_reps >= 2 for a sample variance, got {self.n_reps}")
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        grid = self.estimator.t_grid
        if 0.0 not in grid or 1.0 not in grid:
            raise ConfigError("the experiment t-grid must contain 0 and 1 "
                              "(the boundary correction needs both endpoints)")
        self.cells()  # validates m_list/k_list against the mode

    def innovation(self) -> CopulaSpec:
        """The innovation copula at the targeted tail-dependence level."""
        if self.family == "t":
            rho = tdc_to_param("t", self.lambda_u, nu=self.nu)
            return CopulaSpec(family="t", nu=self.nu, rho=rho)
        beta = tdc_to_param("gumbel", self.lambda_u)
        if self.family == "opc":
            return CopulaSpec(family="opc", theta=1.0, beta=beta)
        return CopulaSpec(family="gumbel", beta=beta)

    def process(self) -> MovingMaxConfig | RepetitionConfig:
        if self.model == "moving_max":
            return two_lag_design(self.a, self.b, self.innovation())
        return RepetitionConfig(theta=self.theta, base=self.innovation())

    def attractor_pickands(self) -> Callable:
        """Dependence function of the limiting copula of the block maxima.

        The block-maxima copula converges to the extreme-value attractor of
        the innovation copula for both process models.
        """
        if self.family == "t":
            rho = tdc_to_param("t", self.lambda_u, nu=self.nu)
            return partial(t_ev_pickands, nu=self.nu, rho=rho)
        return partial(gumbel_pickands, beta=tdc_to_param("gumbel", self.lambda_u))

    def cells(self) -> tuple["Cell", ...]:
        if self.mode == "fixed_n":
            if not self.m_list:
                raise ConfigError("fixed_n mode needs a nonempty m_list")
            out = []
            for m in self.m_list:
                if m < 1:
                    raise ConfigError(f"block lengths must be >= 1, got {m}")
                k = self.n // m
                if k < 2:
                    raise ConfigError(
                        f"m={m} leaves k={k} < 2 blocks of n={self.n}; "
                        "ranks need at least two blocks")
                out.append(Cell(mode="fixed_n", n=self.n, m=m, k=k))
            return tuple(out)
        if not self.k_list:
            raise ConfigError("fixed_m mode needs a nonempty k_list")
        if self.m < 1:
            raise ConfigError(f"block length must be >= 1, got {self.m}")
        out = []
        for k in self.k_list:
            if k < 2:
                raise ConfigError(f"block counts must be >= 2, got {k}")
            out.append(Cell(mode="fixed_m", n=self.m * k, m=self.m, k=k))
        return tuple(out)


@dataclass(frozen=True)
class Cell:
    """One sweep point: series length, block length, and block count."""

    mode: str
    n: int
    m: int
    k: int


@dataclass(frozen=True)
class McSummary:
    """Summed bias/variance/MSE of the estimated dependence function."""

    mode: str
    n: int
    m: int
    k: int
    n_reps: int
    b_sum: float
    var_sum: float
    mse_sum: float


@dataclass(frozen=True)
class Table1Row:
    """Distance between the finite-block target and the limit, one setup."""

    family: str
    lambda_u: float
    distance: float


def _replication_seed(config: ExperimentConfig, cell: Cell, rep_index: int):
    """Stable, documented seed tree: (master_seed, m, k, rep_index)."""
    return np.random.SeedSequence((config.master_seed, cell.m, cell.k, rep_index))


def run_replication(config: ExperimentConfig, cell: Cell, rep_seed) -> np.ndarray:
    """One pipeline pass: simulate, block, estimate; returns A_abc on the grid.

    Args:
        config: experiment description.
        cell: the (n, m, k) sweep point.
        rep_seed: anything ``np.random.default_rng`` accepts.

    Returns:
        Boundary-corrected estimates at the configured t-grid.
    """
    if cell.k < 2:
        raise ConfigError(f"need k >= 2 blocks, got k={cell.k}")
    rng = np.random.default_rng(rep_seed)
    process = config.process()
    try:
        if isinstance(process, MovingMaxConfig):
            path = simulate_moving_max(process, cell.n, rng)
        else:
            path = simulate_repetition(process, cell.n, rng)
        maxima = extract_block_maxima(path, cell.m)
        estimate = estimate_pickands(maxima, config.estimator, m=cell.m)
    except NumericError as exc:
        raise NumericError(
            f"replication failed in cell n={cell.n} m={cell.m} k={cell.k}: {exc}") from exc
    return estimate.corrected


def _replicate_by_index(config: ExperimentConfig, cell: Cell, rep_index: int) -> np.ndarray:
    return run_replication(config, cell, _replication_seed(config, cell, rep_index))


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[McSummary]:
    """Run every cell of the sweep and summarize across replications.

    Args:
        config: experiment description.
        jobs: worker processes; any value yields identical summaries.
    """
    if jobs < 1:
        raise ConfigError(f"need jobs >= 1, got {jobs}")
    t = np.asarray(config.estimator.t_grid, dtype=float)
    interior = (t > 0.0) & (t < 1.0)
    target = np.asarray(config.attractor_pickands()(t[interior]), dtype=float)
    summaries = []
    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for cell in config.cells():
            task = partial(_replicate_by_index, config, cell)
            indices = range(config.n_reps)
            if executor is None:
                rows = [task(i) for i in indices]
            else:
                chunk = max(1, config.n_reps // (4 * jobs))
                rows = list(executor.map(task, indices, chunksize=chunk))
            estimates = np.vstack(rows)[:, interior]
            mean = estimates.mean(axis=0)
            var = estimates.var(axis=0, ddof=1)
            b_sum = float(np.sum((mean - target) ** 2))
            var_sum = float(np.sum(var))
            summaries.append(McSummary(
                mode=cell.mode, n=cell.n, m=cell.m, k=cell.k, n_reps=config.n_reps,
                b_sum=b_sum, var_sum=var_sum, mse_sum=b_sum + var_sum))
    finally:
        if executor is not None:
            executor.shutdown()
    return summaries


def table1(
    kappa: float = 0.5,
    families: Sequence[str] = ("opc", "t"),
    lambdas: Sequence[float] = (0.25, 0.5, 0.75),
    a: float = 0.25,
    b: float = 0.5,
    nu: float = 4.0,
    t_grid: Sequence[float] | None = None,
) -> list[Table1Row]:
    """Distances between the finite-block target A_1* and the limit A_inf.

    For each innovation family and tail-dependence level, builds the two-lag
    moving-max stationary copula C_1, computes its weighted-integral target
    A_1* pointwise, and takes the root-mean-square gap to the attractor's
    dependence function over the evaluation grid (21 equispaced points by
    default) — the discrete counterpart of the L2 distance on [0, 1].
    """
    grid = np.asarray(EstimatorConfig().t_grid if t_grid is None else t_grid, dtype=float)
    if grid.size < 2:
        raise ConfigError("need at least two grid points")
    rows = []
    for family in families:
        for lam in lambdas:
            config = ExperimentConfig(
                model="moving_max", family=family, lambda_u=lam, a=a, b=b, nu=nu,
                n_reps=2)
            evaluator = partial(closed_form_c1, config.process())
            a_inf = config.attractor_pickands()
            gaps = np.array(
                [a1_star(evaluator, tj, kappa=kappa) - a_inf(tj) for tj in grid])
            rows.append(Table1Row(
                family=family, lambda_u=float(lam),
                distance=float(np.sqrt(np.mean(gaps**2)))))
    return rows


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


_SUMMARY_COLUMNS = ("mode", "n", "m", "k", "N", "B_sum", "Var_sum", "MSE_sum")
_TABLE_COLUMNS = ("family", "lambda_U", "l2_distance")


def _summary_line(s: McSummary) -> str:
    return ",".join([
        s.mode, str(s.n), str(s.m), str(s.k), str(s.n_reps),
        f"{s.b_sum:.16e}", f"{s.var_sum:.16e}", f"{s.mse_sum:.16e}"])


def csv_text(data, metadata: Mapping[str, object] | None = None) -> str:
    """Render summaries or a distance table as CSV with `# key=value` comments.

    Accepts a list of McSummary (one block), a list of
    (metadata, [McSummary]) pairs (one labelled block per group — used to
    stack tail-dependence levels into a single file), or a list of
    Table1Row.  Floats are written with 17 significant digits so parsing
    recovers them exactly.
    """
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={_format_value(value)}")
    if not isinstance(data, (list, tuple)) or not data:
        raise ConfigError("need a nonempty list of rows to serialize")
    first = data[0]
    if isinstance(first, Table1Row):
        lines.append(",".join(_TABLE_COLUMNS))
        for row in data:
            lines.append(f"{row.family},{row.lambda_u:.16e},{row.distance:.16e}")
    elif isinstance(first, McSummary):
        lines.append(",".join(_SUMMARY_COLUMNS))
        for s in data:
            lines.append(_summary_line(s))
    elif isinstance(first, tuple) and len(first) == 2:
        lines.append(",".join(_SUMMARY_COLUMNS))
        for group_meta, summaries in data:
            for key, value in group_meta.items():
                lines.append(f"# {key}={_format_value(value)}")
            for s in summaries:
                lines.append(_summary_line(s))
    else:
        raise ConfigError(f"cannot serialize rows of type {type(first).__name__}")
    return "\n".join(lines) + "\n"


def write_csv(data, path, metadata: Mapping[str, object] | None = None) -> None:
    """Write :func:`csv_text` output to ``path`` (I/O errors carry the path)."""
    text = csv_text(data, metadata)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _parse_comment(line: str) -> tuple[str, str]:
    body = line[1:].strip()
    key, _, value = body.partition("=")
    return key.strip(), value.strip()


def read_summary_csv(path) -> tuple[dict, list[tuple[dict, list[McSummary]]]]:
    """Parse a summary CSV back into (top metadata, labelled row groups).

    Comments before the header are file-level metadata; comments between
    data rows start a new labelled group.  Ungrouped rows form one group
    with empty metadata.
    """
    top_meta: dict = {}
    groups: list[tuple[dict, list[McSummary]]] = []
    header_seen = False
    pending_meta: dict = {}
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, value = _parse_comment(line)
            if header_seen:
                pending_meta[key] = value
            else:
                top_meta[key] = value
            continue
        if not header_seen:
            if tuple(line.split(",")) != _SUMMARY_COLUMNS:
                raise ConfigError(
                    f"unexpected summary header {line!r} in {path}; "
                    f"expected {','.join(_SUMMARY_COLUMNS)}")
            header_seen = True
            continue
        if pending_meta or not groups:
            groups.append((pending_meta, []))
            pending_meta = {}
        fields = line.split(",")
        if len(fields) != len(_SUMMARY_COLUMNS):
            raise ConfigError(f"malformed summary row {line!r} in {path}")
        groups[-1][1].append(McSummary(
            mode=fields[0], n=int(fields[1]), m=int(fields[2]), k=int(fields[3]),
            n_reps=int(fields[4]), b_sum=float(fields[5]), var_sum=float(fields[6]),
            mse_sum=float(fields[7])))
    if not header_seen:
        raise ConfigError(f"no header found in {path}")
    return top_meta, groups


def read_table_csv(path) -> tuple[dict, list[Table1Row]]:
    """Parse a distance-table CSV back into (metadata, rows)."""
    meta: dict = {}
    rows: list[Table1Row] = []
    header_seen = False
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, value = _parse_comment(line)
            meta[key] = value
            continue
        if not header_seen:
            if tuple(line.split(",")) != _TABLE_COLUMNS:
                raise ConfigError(
                    f"unexpected table header {line!r} in {path}; "
                    f"expected {','.join(_TABLE_COLUMNS)}")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != len(_TABLE_COLUMNS):
            raise ConfigError(f"malformed table row {line!r} in {path}")
        rows.append(Table1Row(
            family=fields[0], lambda_u=float(fields[1]), distance=float(fields[2])))
    if not header_seen:
        raise ConfigError(f"no header found in {path}")
    return meta, rows


_INT_KEYS = {"n", "m", "n_reps", "master_seed"}
_FLOAT_KEYS = {"lambda_u", "a", "b", "theta", "nu", "kappa", "gamma"}
_LIST_KEYS = {"m_list", "k_list", "t_grid"}
_STR_KEYS = {"model", "family", "mode", "divisor"}


def config_from_items(items: Mapping[str, str]) -> ExperimentConfig:
    """Build an ExperimentConfig from flat key=value text pairs.

    Accepted keys: model, family, lambda_u, a, b, theta, nu, mode, n,
    m_list, m, k_list, n_reps, master_seed, and the estimator keys kappa,
    gamma, divisor, t_grid.  List values are comma-separated.  The
    BLOCKMAX_SEED environment variable, when set, overrides master_seed.
    """
    config_kwargs: dict = {}
    estimator_kwargs: dict = {}
    for key, raw in items.items():
        try:
            if key in _INT_KEYS:
                config_kwargs[key] = int(raw)
            elif key in _FLOAT_KEYS:
                value = float(raw)
                if key in ("kappa", "gamma"):
                    estimator_kwargs[key] = value
                else:
                    config_kwargs[key] = value
            elif key in _LIST_KEYS:
                parts = [p for p in raw.split(",") if p.strip()]
                if key == "t_grid":
                    estimator_kwargs[key] = tuple(float(p) for p in parts)
                else:
                    config_kwargs[key] = tuple(int(p) for p in parts)
            elif key in _STR_KEYS:
                if key == "divisor":
                    estimator_kwargs[key] = raw.strip()
                else:
                    config_kwargs[key] = raw.strip()
            else:
                raise ConfigError(f"unknown configuration key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from exc
    env_seed = os.environ.get("BLOCKMAX_SEED")
    if env_seed is not None:
        try:
            config_kwargs["master_seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"BLOCKMAX_SEED must be an integer, got {env_seed!r}") from exc
    if estimator_kwargs:
        config_kwargs["estimator"] = EstimatorConfig(**estimator_kwargs)
    return ExperimentConfig(**config_kwargs)
