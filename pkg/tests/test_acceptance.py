"""Acceptance gate: one test per top-level deliverable criterion.

Each test is self-contained and carries its tolerances inline; `pytest -v`
prints one pass/fail line per criterion.  Criteria that name a command or
the end-to-end pipeline drive the installed CLI in a subprocess; the rest
exercise the library surface directly.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time
from functools import partial

import numpy as np
import pytest

from blockmax.block_empirics import (
    empirical_copula,
    empirical_copula_alt,
    extract_block_maxima,
    pseudo_observations,
)
from blockmax.copulas import (
    CopulaSpec,
    copula_from_pickands,
    gumbel_cdf,
    gumbel_pickands,
    t_ev_pickands,
    tdc_to_param,
)
from blockmax.monte_carlo import ExperimentConfig, run_experiment
from blockmax.pickands import (
    md_estimate_exact,
    md_estimate_quadrature,
    shape_check,
)
from blockmax.random_repetition import RepetitionConfig
from blockmax.random_repetition import simulate as simulate_repetition

T21 = np.arange(21) / 20.0


def run_cli(*args: str) -> subprocess.CompletedProcess:
    env = os.environ.copy()
    env.pop("BLOCKMAX_SEED", None)
    return subprocess.run(
        [sys.executable, "-m", "blockmax.cli", *args],
        capture_output=True, env=env)


def rows_of(stdout: bytes) -> list[list[str]]:
    lines = [ln for ln in stdout.decode().splitlines()
             if ln.strip() and not ln.startswith("#")]
    return [ln.split(",") for ln in lines[1:]]


def grid_points_2d(n: int = 21) -> np.ndarray:
    g = np.linspace(0.0, 1.0, n)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    return np.stack([uu, vv], axis=-1)


def test_a1_table1_reproduces_published_distances():
    """table1 outputs six distances; both family rows within 1e-3; <1min."""
    start = time.perf_counter()
    res = run_cli("table1")
    elapsed = time.perf_counter() - start
    assert res.returncode == 0, res.stderr.decode()
    rows = rows_of(res.stdout)
    assert len(rows) == 6
    got = {(family, float(lam)): float(dist) for family, lam, dist in rows}
    published = {
        ("opc", 0.25): 4.62e-2, ("opc", 0.5): 1.62e-2, ("opc", 0.75): 1.20e-2,
        ("t", 0.25): 2.86e-2, ("t", 0.5): 2.26e-2, ("t", 0.75): 0.80e-2,
    }
    for key, target in published.items():
        assert got[key] == pytest.approx(target, abs=1e-3), key
    assert elapsed < 60.0


def test_a2_drift_rate_check_halves_with_m():
    """sup|m{C_(1/m,2)-C_(0,2)} - Gamma_2| at m=2000 is <=0.6x m=1000, <=5e-3."""
    start = time.perf_counter()
    res = run_cli("check-rate", "--theta", "1", "--beta", "2",
                  "--m-list", "1000,2000")
    elapsed = time.perf_counter() - start
    assert res.returncode == 0, res.stderr.decode()
    (m1, e1), (m2, e2) = [(int(m), float(e)) for m, e in rows_of(res.stdout)]
    assert (m1, m2) == (1000, 2000)
    assert e2 <= 0.6 * e1
    assert e2 <= 5e-3
    assert elapsed < 30.0


def test_a3_sandwich_bounds_hold_on_grid():
    """lower <= C_m <= upper for m in {2,5,10,50} on a 21x21 grid, slack -1e-12."""
    res = run_cli("sandwich", "--family", "opc", "--lambda-u", "0.5",
                  "--a", "0.25", "--b", "0.5",
                  "--m-list", "2,5,10,50", "--grid-size", "21")
    assert res.returncode == 0, res.stderr.decode()
    rows = rows_of(res.stdout)
    assert [int(r[0]) for r in rows] == [2, 5, 10, 50]
    for _, lo_slack, up_slack in rows:
        assert float(lo_slack) >= -1e-12
        assert float(up_slack) >= -1e-12


def test_a4_empirical_copula_forms_agree():
    """Rank and order-statistic forms: d/k apart (iid), sqrt(k)-small (ties)."""
    # iid continuous samples: sup over the jump grid bounded by d/k, exactly
    rng = np.random.default_rng(41)
    for _ in range(100):
        k = int(rng.integers(2, 51))
        d = int(rng.integers(2, 4))
        x = rng.standard_normal((k, d))
        po = pseudo_observations(x)
        bm = extract_block_maxima(x, 1)
        axis = np.arange(k + 1) / k
        if d == 2:
            uu, vv = np.meshgrid(axis, axis, indexing="ij")
            pts = np.stack([uu, vv], axis=-1).reshape(-1, 2)
        else:
            idx = rng.integers(0, k + 1, size=(400, d))
            pts = np.vstack([axis[idx], po.values])
        gap = np.abs(empirical_copula(po, pts) - empirical_copula_alt(bm, pts))
        assert gap.max() <= d / k

    # repetition-model block maxima (ties): seeded sqrt(k)-scale guard
    theta, m, k = 0.5, 20, 2_000
    config = RepetitionConfig(
        theta=theta, base=CopulaSpec(family="opc", theta=1.0, beta=2.0))
    pts = grid_points_2d()
    for seed in range(20):
        path = simulate_repetition(config, m * k, np.random.default_rng(seed))
        bm = extract_block_maxima(path, m)
        gap = np.abs(
            np.asarray(empirical_copula(pseudo_observations(bm), pts))
            - np.asarray(empirical_copula_alt(bm, pts)))
        assert np.sqrt(k) * gap.max() <= 0.5, f"seed {seed}"


def test_a5_estimator_plugin_identities():
    """Quadrature on true limits reproduces them; exact form matches quadrature."""
    # plugging the limit copula into the functional returns its generator
    beta = tdc_to_param("gumbel", 0.5)
    rho = tdc_to_param("t", 0.5, nu=4.0)
    t_pick = partial(t_ev_pickands, nu=4.0, rho=rho)
    plugins = [
        (lambda p: float(gumbel_cdf(p[0], p[1], beta)),
         lambda t: float(gumbel_pickands(t, beta))),
        (lambda p: float(copula_from_pickands(t_pick, p)),
         lambda t: float(t_pick(t))),
    ]
    for evaluator, target in plugins:
        for t in T21:
            got = md_estimate_quadrature(evaluator, float(t), weight=0.5)
            assert got == pytest.approx(target(float(t)), abs=1e-8)

    # the exact piecewise form equals the quadrature path on random inputs
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(5, 51))
        po = pseudo_observations(rng.standard_normal((k, 2)))
        t = float(rng.uniform(0.05, 0.95))
        jumps = np.maximum(
            po.values[:, 0] ** (1.0 / (1.0 - t)), po.values[:, 1] ** (1.0 / t))
        exact = md_estimate_exact(po, t)
        quad = md_estimate_quadrature(
            lambda p: empirical_copula(po, p), t,
            weight=0.5, gamma=2.0 / 3.0, k=po.k, breakpoints=jumps)
        worst = max(worst, abs(float(exact) - quad))
    assert worst <= 1e-8


def test_a6_error_decay_with_block_count():
    """Fixed m=30: MSE(k=96)/MSE(k=48) in [0.3, 0.7]; variance decreasing."""
    start = time.perf_counter()
    config = ExperimentConfig(
        model="moving_max", family="opc", lambda_u=0.5, a=0.25, b=0.5,
        mode="fixed_m", m=30, k_list=(12, 48, 96, 240), n_reps=200,
        master_seed=20240)
    summaries = run_experiment(config, jobs=4)
    elapsed = time.perf_counter() - start
    by_k = {s.k: s for s in summaries}
    ratio = by_k[96].mse_sum / by_k[48].mse_sum
    assert 0.3 <= ratio <= 0.7
    assert by_k[12].var_sum > by_k[48].var_sum > by_k[240].var_sum
    assert elapsed <= 600.0


def test_a7_parallel_pipeline_is_byte_identical(tmp_path):
    """mc --jobs 1 and --jobs 8 write byte-identical CSVs for one seed."""
    cfg = tmp_path / "mc.cfg"
    cfg.write_text(
        "mode=fixed_m\nm=5\nk_list=10,20\nn_reps=16\nlambda_u=0.5\n"
        "master_seed=11\n")
    out1, out8 = tmp_path / "jobs1.csv", tmp_path / "jobs8.csv"
    res1 = run_cli("mc", "--config", str(cfg), "--jobs", "1", "--out", str(out1))
    res8 = run_cli("mc", "--config", str(cfg), "--jobs", "8", "--out", str(out8))
    assert res1.returncode == 0, res1.stderr.decode()
    assert res8.returncode == 0, res8.stderr.decode()
    assert out1.read_bytes() == out8.read_bytes()


def test_a8_copula_axioms_and_shape_constraints():
    """Grounding/margins/2-increasingness and dependence-function shape."""
    specs = [CopulaSpec(family="opc", theta=1.0, beta=tdc_to_param("gumbel", lam))
             for lam in (0.25, 0.5, 0.75)]
    specs += [CopulaSpec(family="t", nu=4.0, rho=tdc_to_param("t", 0.5, nu=4.0)),
              CopulaSpec(family="gumbel", beta=2.0)]
    g = np.linspace(0.0, 1.0, 21)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    for spec in specs:
        c = np.asarray(spec.cdf(np.stack([uu, vv], axis=-1)))
        assert np.abs(c[0, :]).max() <= 1e-12, spec.family      # grounded
        assert np.abs(c[:, 0]).max() <= 1e-12, spec.family
        assert np.abs(c[-1, :] - g).max() <= 1e-12, spec.family  # margins
        assert np.abs(c[:, -1] - g).max() <= 1e-12, spec.family
        rect = c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]
        assert rect.min() >= -1e-12, spec.family                 # 2-increasing

    for fn in (partial(gumbel_pickands, beta=tdc_to_param("gumbel", 0.5)),
               partial(t_ev_pickands, nu=4.0, rho=tdc_to_param("t", 0.5, nu=4.0))):
        report = shape_check(np.asarray(fn(T21)), T21)
        assert report.ok
        assert float(fn(0.0)) == pytest.approx(1.0, abs=1e-12)
        assert float(fn(1.0)) == pytest.approx(1.0, abs=1e-12)
