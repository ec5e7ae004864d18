"""Tests for the minimum-distance dependence-function estimator.

Frozen values were computed with mpmath (50 digits) from the closed
piecewise form; derivations are noted inline.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockmax import ConfigError, CopulaSpec, NumericError
from blockmax.block_empirics import (
    PseudoObs,
    empirical_copula,
    extract_block_maxima,
    pseudo_observations,
)
from blockmax.copulas import (
    copula_from_pickands,
    gumbel_cdf,
    gumbel_pickands,
    opc_cdf,
    sample,
    t_ev_pickands,
)
from blockmax.pickands import (
    EstimatorConfig,
    a1_star,
    boundary_correct,
    estimate_pickands,
    l2_distance,
    md_estimate_exact,
    md_estimate_quadrature,
    shape_check,
    weight_pk,
)

# Comonotone pseudo-observations U_i = (i/4, i/4), kappa=0.5, gamma=2/3,
# t=0.5: jump points z_i = (i/4)^2, piecewise value j/4 floored at 4^(-2/3);
# evaluated with mpmath at 50 digits.
COMONOTONE_K4_T05 = 0.7314281961873657459679

T11 = np.arange(0, 11) / 10
T21 = np.arange(0, 21) / 20


def ray_jumps(po: PseudoObs, t: float) -> np.ndarray:
    u = po.values
    if t == 0.0:
        return u[:, 0]
    if t == 1.0:
        return u[:, 1]
    return np.maximum(u[:, 0] ** (1 / (1 - t)), u[:, 1] ** (1 / t))


def random_pseudo(rng, k: int) -> PseudoObs:
    x = rng.standard_normal((k, 2))
    x[:, 1] = 0.5 * x[:, 0] + np.sqrt(0.75) * x[:, 1]
    return pseudo_observations(x)


class TestWeight:
    def test_normalization(self):
        # closed form: (kappa+1)^2 int y^kappa |log y| dy = 1
        from scipy.integrate import quad

        for kappa in (0.5, 1.0, 2.0):
            val, _ = quad(lambda y: weight_pk(y, kappa), 0, 1)
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_prefactor_kappa_half(self):
        # kappa = 0.5 gives (3/2)^2 = 9/4 times sqrt(y)|log y|
        y = 0.25
        assert weight_pk(y, 0.5) == pytest.approx(2.25 * math.sqrt(y) * math.log(4), abs=1e-15)

    def test_domain(self):
        with pytest.raises(ConfigError):
            weight_pk(0.0, 0.5)
        with pytest.raises(ConfigError):
            weight_pk(1.0, 0.5)
        with pytest.raises(ConfigError):
            weight_pk(0.5, 0.0)


class TestExactEstimator:
    def test_comonotone_hand_value(self):
        po = PseudoObs(values=np.column_stack([np.arange(1, 5) / 4] * 2), divisor="k", m=0)
        assert md_estimate_exact(po, 0.5) == pytest.approx(COMONOTONE_K4_T05, abs=1e-13)

    def test_comonotone_large_k_near_lower_bound(self):
        k = 400
        po = PseudoObs(values=np.column_stack([np.arange(1, k + 1) / k] * 2), divisor="k", m=0)
        assert md_estimate_exact(po, 0.5) == pytest.approx(0.5, abs=0.03)

    def test_t_zero_uses_first_margin_only(self):
        rng = np.random.default_rng(5)
        po = random_pseudo(rng, 30)
        only_first = PseudoObs(
            values=np.column_stack([po.values[:, 0], np.full(30, 1.0)]), divisor="k", m=0
        )
        assert md_estimate_exact(po, 0.0) == md_estimate_exact(only_first, 0.0)
        # and the top-ranked pseudo-observation 1.0 in the other column does
        # not disturb t=0/t=1 (the degenerate constraint is dropped)
        assert md_estimate_exact(po, 1.0) == md_estimate_exact(
            PseudoObs(np.column_stack([np.full(30, 1.0), po.values[:, 1]]), "k", 0), 1.0
        )

    def test_marginal_estimate_tends_to_one(self):
        # at t=0 the estimator integrates the marginal empirical cdf; as k
        # grows it approaches 1 like (log k)/k
        for k, tol in ((50, 0.1), (5000, 0.01)):
            po = PseudoObs(
                values=np.column_stack([np.arange(1, k + 1) / k] * 2), divisor="k", m=0
            )
            assert md_estimate_exact(po, 0.0) == pytest.approx(1.0, abs=tol)

    def test_vectorized_over_t(self):
        rng = np.random.default_rng(8)
        po = random_pseudo(rng, 25)
        vec = md_estimate_exact(po, T11)
        np.testing.assert_array_equal(vec, [md_estimate_exact(po, t) for t in T11])

    def test_rank_invariance(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((40, 2))
        y = np.stack([np.exp(x[:, 0]), np.arctan(x[:, 1])], axis=1)
        a = md_estimate_exact(pseudo_observations(x), T21)
        b = md_estimate_exact(pseudo_observations(y), T21)
        np.testing.assert_array_equal(a, b)

    def test_domain_errors(self):
        po = random_pseudo(np.random.default_rng(0), 10)
        with pytest.raises(ConfigError):
            md_estimate_exact(po, -0.1)
        with pytest.raises(ConfigError):
            md_estimate_exact(po, 1.1)
        with pytest.raises(ConfigError):
            md_estimate_exact(po, 0.5, kappa=0.0)
        with pytest.raises(ConfigError):
            md_estimate_exact(po, 0.5, gamma=0.5)
        with pytest.raises(ConfigError):
            md_estimate_exact(np.zeros((5, 2)), 0.5)
        with pytest.raises(ConfigError):
            md_estimate_exact(np.ones((5, 3)), 0.5)

    @given(seed=st.integers(0, 10_000), t=st.floats(0.0, 1.0))
    @settings(max_examples=60)
    def test_positive_and_finite(self, seed, t):
        po = random_pseudo(np.random.default_rng(seed), 15)
        val = md_estimate_exact(po, t)
        assert np.isfinite(val) and val > 0

    def test_truncation_sensitivity_shrinks_with_k(self):
        # The gamma 2/3 -> 0.9 perturbation only touches the floored segments
        # near y=0, whose weighted mass decays like (log k)/k; on a mid-range
        # t-grid the effect shrinks monotonically in k and is < 1e-3 by k=800.
        spec = CopulaSpec(family="gumbel", beta=3.0)
        deltas = []
        for k in (50, 200, 800):
            po = pseudo_observations(sample(spec, k, np.random.default_rng(77)))
            deltas.append(
                max(
                    abs(md_estimate_exact(po, t, 0.5, 2 / 3) - md_estimate_exact(po, t, 0.5, 0.9))
                    for t in (0.35, 0.5, 0.65)
                )
            )
        assert deltas[0] > deltas[1] > deltas[2]
        assert deltas[2] < 1e-3


class TestQuadratureEstimator:
    def test_matches_exact_on_random_sets(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(10):
            k = int(rng.integers(5, 51))
            po = random_pseudo(rng, k)
            for t in T11:
                ex = md_estimate_exact(po, t)
                q = md_estimate_quadrature(
                    lambda p: empirical_copula(po, p),
                    t,
                    weight=0.5,
                    gamma=2 / 3,
                    k=po.k,
                    breakpoints=ray_jumps(po, t),
                )
                worst = max(worst, abs(ex - q))
        assert worst <= 1e-8

    def test_independence_plugin_is_one(self):
        ev = lambda p: float(np.prod(p))
        for t in (0.0, 0.3, 0.5, 0.9, 1.0):
            assert md_estimate_quadrature(ev, t) == pytest.approx(1.0, abs=1e-9)

    def test_comonotone_plugin_is_lower_bound(self):
        ev = lambda p: float(np.min(p))
        for t in (0.0, 0.25, 0.5, 0.8, 1.0):
            assert md_estimate_quadrature(ev, t) == pytest.approx(max(t, 1 - t), abs=1e-9)

    def test_gumbel_plugin_identity(self):
        for beta in (1.5, 2.0):
            ev = lambda p, b=beta: gumbel_cdf(p[..., 0], p[..., 1], b)
            for t in T21:
                assert md_estimate_quadrature(ev, t) == pytest.approx(
                    gumbel_pickands(t, beta), abs=1e-8
                )

    def test_t_ev_plugin_identity(self):
        from functools import partial

        fn = partial(t_ev_pickands, nu=4.0, rho=0.5)
        ev = lambda p: copula_from_pickands(fn, p)
        for t in T21:
            assert md_estimate_quadrature(ev, t) == pytest.approx(fn(t), abs=1e-8)

    def test_callable_weight_matches_kappa(self):
        ev = lambda p: gumbel_cdf(p[..., 0], p[..., 1], 2.0)
        pk = lambda y: weight_pk(y, 0.5)
        for t in (0.2, 0.5):
            assert md_estimate_quadrature(ev, t, weight=pk) == pytest.approx(
                md_estimate_quadrature(ev, t, weight=0.5), abs=1e-8
            )

    def test_trivariate_simplex_point(self):
        # independence in d=3: log C(y^t) = log y for any simplex point
        ev = lambda p: float(np.prod(p))
        assert md_estimate_quadrature(ev, (0.3, 0.4)) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_domain_and_failure(self):
        ev = lambda p: float(np.prod(p))
        with pytest.raises(ConfigError):
            md_estimate_quadrature(ev, (0.7, 0.7))
        with pytest.raises(ConfigError):
            md_estimate_quadrature(ev, 0.5, gamma=2 / 3)  # gamma without k
        wild = lambda p: min(max(float(np.prod(p)) * (1 + 0.999 * np.sin(500.0 / (p[0] + 1e-9))), 1e-300), 1.0)
        with pytest.raises(NumericError):
            md_estimate_quadrature(wild, 0.5)


class TestBoundaryCorrection:
    def make(self, raw, t=None):
        t = np.asarray([0.0, 0.5, 1.0] if t is None else t)
        return estimate_pickands  # placeholder, not used

    def test_identity_when_endpoints_are_one(self):
        from blockmax.pickands import PickandsEstimate

        est = PickandsEstimate(
            t=np.array([0.0, 0.5, 1.0]),
            raw=np.array([1.0, 0.8, 1.0]),
            corrected=None,
            config=EstimatorConfig(t_grid=(0.0, 0.5, 1.0)),
            k=10,
        )
        np.testing.assert_allclose(boundary_correct(est).corrected, est.raw)

    def test_endpoint_pinning_and_midpoint_arithmetic(self):
        from blockmax.pickands import PickandsEstimate

        est = PickandsEstimate(
            t=np.array([0.0, 0.5, 1.0]),
            raw=np.array([1.02, 0.77, 0.98]),
            corrected=None,
            config=EstimatorConfig(t_grid=(0.0, 0.5, 1.0)),
            k=10,
        )
        got = boundary_correct(est).corrected
        assert got[0] == pytest.approx(1.0, abs=1e-15)
        assert got[2] == pytest.approx(1.0, abs=1e-15)
        # -0.5*(0.02) - 0.5*(-0.02) cancels exactly
        assert got[1] == pytest.approx(0.77, abs=1e-15)

    def test_requires_endpoints(self):
        from blockmax.pickands import PickandsEstimate

        est = PickandsEstimate(
            t=np.array([0.1, 0.5]),
            raw=np.array([0.9, 0.8]),
            corrected=None,
            config=EstimatorConfig(t_grid=(0.1, 0.5)),
            k=10,
        )
        with pytest.raises(ConfigError):
            boundary_correct(est)

    @given(seed=st.integers(0, 5000))
    @settings(max_examples=30)
    def test_correction_bounded_by_endpoint_errors(self, seed):
        po = random_pseudo(np.random.default_rng(seed), 20)
        est = estimate_pickands(po, EstimatorConfig())
        bound = abs(est.raw[0] - 1) + abs(est.raw[-1] - 1) + 1e-15
        assert np.max(np.abs(est.corrected - est.raw)) <= bound


class TestEstimatePipeline:
    def test_estimate_converges_to_truth(self):
        spec = CopulaSpec(family="gumbel", beta=2.0)
        xs = sample(spec, 20_000, np.random.default_rng(31))
        est = estimate_pickands(extract_block_maxima(xs, 20), EstimatorConfig())
        truth = gumbel_pickands(est.t, 2.0)
        assert np.max(np.abs(est.corrected - truth)) < 0.05
        assert est.k == 1000 and est.m == 20

    def test_grid_without_endpoints_leaves_uncorrected(self):
        po = random_pseudo(np.random.default_rng(3), 15)
        est = estimate_pickands(po, EstimatorConfig(t_grid=(0.2, 0.5, 0.8)))
        assert est.corrected is None
        np.testing.assert_array_equal(est.values, est.raw)

    def test_divisor_flows_through(self):
        x = np.random.default_rng(4).standard_normal((30, 2))
        bm = extract_block_maxima(x, 1)
        a = estimate_pickands(bm, EstimatorConfig(divisor="k"))
        b = estimate_pickands(bm, EstimatorConfig(divisor="k+1"))
        assert not np.array_equal(a.raw, b.raw)

    def test_csv_export(self):
        po = random_pseudo(np.random.default_rng(6), 12)
        est = estimate_pickands(po, EstimatorConfig())
        text = est.to_csv()
        lines = text.strip().splitlines()
        assert lines[4] == "t,A_raw,A_abc"
        assert any(ln.startswith("# kappa=") for ln in lines)
        body = np.loadtxt(lines[5:], delimiter=",")
        np.testing.assert_allclose(body[:, 0], est.t)
        np.testing.assert_allclose(body[:, 1], est.raw)
        np.testing.assert_allclose(body[:, 2], est.corrected)


class TestA1Star:
    def test_t_zero_is_one_for_any_copula(self):
        ev = lambda p: opc_cdf(p[..., 0], p[..., 1], theta=1.0, beta=2.0)
        assert a1_star(ev, 0.0) == pytest.approx(1.0, abs=1e-10)
        assert a1_star(ev, 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_ev_representation_identity(self):
        ev = lambda p: gumbel_cdf(p[..., 0], p[..., 1], 2.0)
        for t in T21:
            assert a1_star(ev, t) == pytest.approx(gumbel_pickands(t, 2.0), abs=1e-10)

    def test_matches_independent_quadrature_on_non_ev_copula(self):
        # cross-check the tanh-sinh path against scipy's adaptive scheme on
        # a copula that is not extreme-value
        ev = lambda p: opc_cdf(p[..., 0], p[..., 1], theta=1.5, beta=2.0)
        for t in (0.1, 0.35, 0.5, 0.8):
            assert a1_star(ev, t) == pytest.approx(
                md_estimate_quadrature(ev, t, weight=0.5), abs=1e-9
            )

    def test_kappa_two(self):
        ev = lambda p: gumbel_cdf(p[..., 0], p[..., 1], 1.5)
        assert a1_star(ev, 0.5, kappa=2.0) == pytest.approx(
            gumbel_pickands(0.5, 1.5), abs=1e-10
        )

    def test_domain(self):
        ev = lambda p: np.prod(p, axis=-1)
        with pytest.raises(ConfigError):
            a1_star(ev, 1.5)
        with pytest.raises(ConfigError):
            a1_star(ev, 0.5, kappa=-1.0)


class TestL2Distance:
    def test_zero_for_equal(self):
        assert l2_distance(math.sin, math.sin) == 0.0

    def test_hand_value(self):
        assert l2_distance(lambda t: 1.0, lambda t: 1.0 - t) == pytest.approx(
            1 / math.sqrt(3), abs=1e-10
        )

    def test_symmetry(self):
        f, g = (lambda t: t * t), (lambda t: math.cos(t))
        assert l2_distance(f, g) == pytest.approx(l2_distance(g, f), abs=1e-12)


class TestShapeCheck:
    def test_true_pickands_passes(self):
        rep = shape_check(gumbel_pickands(np.linspace(0, 1, 41), beta=2.0))
        assert rep.ok

    def test_constant_below_bound(self):
        rep = shape_check(np.full(21, 0.4))
        assert rep.lower_violations == 21
        assert rep.max_lower_excess == pytest.approx(0.6)
        assert rep.upper_violations == 0

    def test_concave_bump_flagged(self):
        t = np.linspace(0, 1, 21)
        a = np.ones_like(t)
        a[10] = 1.05  # above 1 and locally concave
        rep = shape_check(a)
        assert rep.upper_violations == 1
        assert rep.convexity_violations >= 1
        assert not rep.ok

    def test_raw_estimate_reported_not_rejected(self):
        po = PseudoObs(values=np.column_stack([np.arange(1, 51) / 50] * 2), divisor="k", m=0)
        est = estimate_pickands(po, EstimatorConfig())
        rep = shape_check(est.corrected, t=est.t)
        assert isinstance(rep.ok, bool)  # diagnostic only, never raises

    def test_errors(self):
        with pytest.raises(ConfigError):
            shape_check(np.array([1.0, 1.0]))
        with pytest.raises(ConfigError):
            shape_check(np.ones(5), t=np.ones(4))


class TestConfigValidation:
    def test_defaults(self):
        cfg = EstimatorConfig()
        assert cfg.kappa == 0.5 and cfg.gamma == pytest.approx(2 / 3)
        assert cfg.divisor == "k"
        assert len(cfg.t_grid) == 21 and cfg.t_grid[0] == 0.0 and cfg.t_grid[-1] == 1.0

    def test_theory_range(self):
        lo, hi = EstimatorConfig(kappa=0.5).theory_gamma_range
        assert lo == 0.5 and hi == pytest.approx(0.75, abs=1e-8)
        assert EstimatorConfig(kappa=0.5, gamma=0.9)  # accepted, outside theory range

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kappa=0.0),
            dict(kappa=-1.0),
            dict(gamma=0.5),
            dict(gamma=0.0),
            dict(divisor="n"),
            dict(t_grid=()),
            dict(t_grid=(0.0, 1.2)),
            dict(t_grid=(-0.1, 0.5)),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            EstimatorConfig(**kwargs)
