"""Parametric copula families: cdfs, samplers, Pickands functions, drift.

Families
--------
* ``opc`` — outer-power Clayton: the Clayton generator composed with an
  outer power,

      C(u, v) = [1 + {(u^-theta - 1)^beta + (v^-theta - 1)^beta}^(1/beta)]^(-1/theta),

  theta > 0, beta >= 1.  As theta -> 0 it converges to the Gumbel-Hougaard
  copula with the same beta; the first-order drift in theta is
  :func:`gamma_beta_drift`.
* ``gumbel`` — Gumbel-Hougaard: C(u, v) = exp[-{(-log u)^beta +
  (-log v)^beta}^(1/beta)], an extreme-value copula with Pickands function
  A(t) = {t^beta + (1-t)^beta}^(1/beta).
* ``t`` — bivariate Student-t copula with nu > 0 degrees of freedom and
  correlation rho in (-1, 1); its cdf is evaluated through the exact
  conditional representation (the conditional law of one coordinate of a
  bivariate t given the other is a scaled/shifted univariate t).
* ``independence`` — the product copula, any dimension.
* ``pickands`` — an extreme-value copula given directly by a Pickands
  dependence function A on the unit simplex:

      C(u) = exp{ (sum_j log u_j) * A(log u_2 / S, ..., log u_d / S) },

  S = sum_j log u_j.

Tail-dependence mapping: for Gumbel/OPC the upper tail-dependence
coefficient is lambda = 2 - 2^(1/beta); for the t copula it is
lambda = 2 * T_{nu+1}(-sqrt((nu+1)(1-rho)/(1+rho))).  ``tdc_to_param``
inverts these maps.

All evaluators are pure and vectorized; samplers mutate only the generator
they are handed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, Literal

import numpy as np
from scipy import special

from blockmax._errors import ConfigError, NumericError

Family = Literal["opc", "gumbel", "t", "independence", "pickands"]

_EXACT_FAMILIES = ("opc", "gumbel", "t")


@dataclass(frozen=True)
class CopulaSpec:
    """A parametric copula model: family tag plus parameters.

    Fields irrelevant to the chosen family stay ``None``.  Validation happens
    here, at construction, never inside the cdf/sampler hot paths.

    Args:
        family: one of ``opc``, ``gumbel``, ``t``, ``independence``,
            ``pickands``.
        theta: OPC inner (Clayton) parameter, > 0.
        beta: OPC/Gumbel outer power, >= 1.
        nu: t-copula degrees of freedom, > 0.
        rho: t-copula correlation, in (-1, 1).
        d: dimension, >= 2.  The exact opc/gumbel/t cdfs are bivariate.
        pickands_fn: for ``family="pickands"``, the dependence function;
            called with t of shape (...,) when d == 2 and (..., d-1)
            otherwise.
    """

    family: Family
    theta: float | None = None
    beta: float | None = None
    nu: float | None = None
    rho: float | None = None
    d: int = 2
    pickands_fn: Callable | None = None

    def __post_init__(self) -> None:
        if self.family not in ("opc", "gumbel", "t", "independence", "pickands"):
            raise ConfigError(f"unknown copula family {self.family!r}")
        if self.d < 2:
            raise ConfigError(f"dimension must be >= 2, got {self.d}")
        if self.family in _EXACT_FAMILIES and self.d != 2:
            raise ConfigError(f"family {self.family!r} is implemented for d = 2 only")
        if self.family == "opc":
            if self.theta is None or not self.theta > 0:
                raise ConfigError(f"opc requires theta > 0, got {self.theta}")
            if self.beta is None or not self.beta >= 1:
                raise ConfigError(f"opc requires beta >= 1, got {self.beta}")
        elif self.family == "gumbel":
            if self.beta is None or not self.beta >= 1:
                raise ConfigError(f"gumbel requires beta >= 1, got {self.beta}")
        elif self.family == "t":
            if self.nu is None or not self.nu > 0:
                raise ConfigError(f"t copula requires nu > 0, got {self.nu}")
            if self.rho is None or not -1 < self.rho < 1:
                raise ConfigError(f"t copula requires -1 < rho < 1, got {self.rho}")
        elif self.family == "pickands":
            if self.pickands_fn is None:
                raise ConfigError("pickands family requires pickands_fn")

    def cdf(self, u) -> np.ndarray | float:
        """Evaluate the copula cdf at points ``u`` of shape (..., d)."""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.d:
            raise ConfigError(f"expected points of dimension {self.d}, got {u.shape[-1]}")
        if self.family == "independence":
            return np.prod(u, axis=-1)
        if self.family == "opc":
            return opc_cdf(u[..., 0], u[..., 1], self.theta, self.beta)
        if self.family == "gumbel":
            return gumbel_cdf(u[..., 0], u[..., 1], self.beta)
        if self.family == "t":
            return t_copula_cdf(u[..., 0], u[..., 1], self.nu, self.rho)
        return copula_from_pickands(self.pickands_fn, u)

    def pickands(self, t) -> np.ndarray | float:
        """Pickands dependence function, for families that are extreme-value copulas."""
        if self.family == "gumbel":
            return gumbel_pickands(t, self.beta)
        if self.family == "independence":
            return np.ones_like(np.asarray(t, dtype=float)[..., 0]) if self.d > 2 else (
                np.ones_like(np.asarray(t, dtype=float)))
        if self.family == "pickands":
            return self.pickands_fn(t)
        raise ConfigError(f"family {self.family!r} is not an extreme-value copula; "
                          "use ev_attractor() for its limit")

    def describe(self) -> str:
        """Short human-readable label, e.g. for test ids and CSV comments."""
        parts = [self.family]
        for name in ("theta", "beta", "nu", "rho"):
            val = getattr(self, name)
            if val is not None:
                parts.append(f"{name}={val:g}")
        return "-".join(parts)

    def to_record(self) -> dict:
        """Flat key-value serialization consumed by the CLI config format."""
        if self.family == "pickands":
            raise ConfigError("function-backed pickands specs are not serializable")
        return {"family": self.family, "theta": self.theta, "beta": self.beta,
                "nu": self.nu, "rho": self.rho, "d": self.d}

    @staticmethod
    def from_record(record: dict) -> "CopulaSpec":
        known = {"family", "theta", "beta", "nu", "rho", "d"}
        unknown = set(record) - known
        if unknown:
            raise ConfigError(f"unknown copula spec keys: {sorted(unknown)}")
        if "family" not in record:
            raise ConfigError("copula spec record needs a 'family' key")
        rec = dict(record)
        family = rec.pop("family")
        kwargs = {k: (None if v is None else (int(v) if k == "d" else float(v)))
                  for k, v in rec.items()}
        return CopulaSpec(family=family, **kwargs)


def ev_attractor(spec: CopulaSpec) -> CopulaSpec:
    """The extreme-value copula in whose max-domain of attraction ``spec`` lies.

    opc(theta, beta) -> gumbel(beta); t(nu, rho) -> its extreme-value limit
    (a ``pickands`` spec backed by :func:`t_ev_pickands`); extreme-value
    families are their own attractor.
    """
    if spec.family == "opc":
        return CopulaSpec("gumbel", beta=spec.beta)
    if spec.family == "t":
        return CopulaSpec("pickands", d=2,
                          pickands_fn=partial(t_ev_pickands, nu=spec.nu, rho=spec.rho))
    if spec.family in ("gumbel", "independence", "pickands"):
        return spec
    raise ConfigError(f"no attractor known for family {spec.family!r}")


def _check_opc_params(theta: float, beta: float) -> None:
    if not theta > 0:
        raise ConfigError(f"theta must be > 0, got {theta}")
    if not beta >= 1:
        raise ConfigError(f"beta must be >= 1, got {beta}")


def opc_cdf(u, v, theta: float, beta: float):
    """Outer-power Clayton cdf, grounded by continuity at zero coordinates.

    Evaluated in log space with expm1/log1p so that theta near 0 (the
    Gumbel-Hougaard limit regime) keeps full precision.
    """
    _check_opc_params(theta, beta)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    out = np.zeros(u.shape, dtype=float)
    pos = (u > 0) & (v > 0)
    with np.errstate(divide="ignore"):
        # u^-theta - 1 = expm1(-theta log u), exact for small theta
        x = np.expm1(-theta * np.log(u[pos]))
        y = np.expm1(-theta * np.log(v[pos]))
    s = np.power(x, beta) + np.power(y, beta)
    out[pos] = np.exp(-np.log1p(np.power(s, 1.0 / beta)) / theta)
    return out if out.ndim else float(out)


def gumbel_cdf(u, v, beta: float):
    """Gumbel-Hougaard cdf exp[-{(-log u)^beta + (-log v)^beta}^(1/beta)]."""
    if not beta >= 1:
        raise ConfigError(f"beta must be >= 1, got {beta}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    out = np.zeros(u.shape, dtype=float)
    pos = (u > 0) & (v > 0)
    x = np.power(-np.log(u[pos]), beta)
    y = np.power(-np.log(v[pos]), beta)
    out[pos] = np.exp(-np.power(x + y, 1.0 / beta))
    return out if out.ndim else float(out)


def gumbel_pickands(t, beta: float):
    """Pickands function {t^beta + (1-t)^beta}^(1/beta) of the Gumbel copula."""
    if not beta >= 1:
        raise ConfigError(f"beta must be >= 1, got {beta}")
    t = np.asarray(t, dtype=float)
    out = np.power(np.power(t, beta) + np.power(1.0 - t, beta), 1.0 / beta)
    return out if out.ndim else float(out)


def gamma_beta_drift(u, v, beta: float):
    """First-order drift of the OPC family toward its Gumbel limit.

    Gamma_beta(u, v) = (1/2) exp{-(x^b+y^b)^(1/b)} [ (x^b+y^b)^(2/b)
                       - (x^b+y^b)^(1/b-1) (x^(b+1)+y^(b+1)) ],
    x = -log u, y = -log v, read as 0 whenever min(u, v) = 0; it satisfies
    m {C_(theta/m, beta) - C_(0, beta)} -> theta * Gamma_beta as m -> inf.
    """
    if not beta >= 1:
        raise ConfigError(f"beta must be >= 1, got {beta}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    out = np.zeros(u.shape, dtype=float)
    # interior: the formula is regular unless x = y = 0 (u = v = 1), where
    # s^(1/beta - 1) is 0^negative; the limit there is 0
    pos = (u > 0) & (v > 0) & ~((u == 1) & (v == 1))
    x = -np.log(u[pos])
    y = -np.log(v[pos])
    s = np.power(x, beta) + np.power(y, beta)
    out[pos] = 0.5 * np.exp(-np.power(s, 1.0 / beta)) * (
        np.power(s, 2.0 / beta)
        - np.power(s, 1.0 / beta - 1.0) * (np.power(x, beta + 1) + np.power(y, beta + 1))
    )
    return out if out.ndim else float(out)


def t_cdf_1d(x, nu: float):
    """Univariate Student-t cdf via the regularized incomplete beta function.

    Two complementary incomplete-beta branches keep full precision on both
    sides: near the center the argument x^2/(nu+x^2) is formed without
    cancellation, in the tails nu/(nu+x^2) is.
    """
    if not nu > 0:
        raise ConfigError(f"nu must be > 0, got {nu}")
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):  # x2 = inf beyond 1e154 still lands in the right branch
        x2 = x * x
        center = x2 <= nu
        w = np.where(center, x2, nu) / (nu + x2)
    # center: F = 1/2 + sign(x)/2 * I_{x^2/(nu+x^2)}(1/2, nu/2)
    half = 0.5 * special.betainc(0.5, 0.5 * nu, np.where(center, w, 0.0))
    out_center = 0.5 + np.sign(x) * half
    # tails: the tail mass 1/2 * I_{nu/(nu+x^2)}(nu/2, 1/2), at full relative
    # precision on the negative side
    tail = 0.5 * special.betainc(0.5 * nu, 0.5, np.where(center, 0.0, w))
    out_tail = np.where(x >= 0, 1.0 - tail, tail)
    out = np.where(center, out_center, out_tail)
    return out if out.ndim else float(out)


def _t_pdf_1d(x, nu: float):
    c = math.exp(math.lgamma(0.5 * (nu + 1)) - math.lgamma(0.5 * nu)) / math.sqrt(nu * math.pi)
    return c * np.power(1.0 + x * x / nu, -0.5 * (nu + 1))


def t_quantile_1d(p, nu: float):
    """Student-t quantile by safeguarded Newton iteration on the cdf.

    Monotone root-finding with a maintained bracket; the result satisfies
    |t_cdf_1d(q, nu) - p| <= 1e-12 (and is usually at machine precision).

    Args:
        p: probabilities, each in the open interval (0, 1).
        nu: degrees of freedom, > 0.

    Raises:
        ConfigError: if some p is outside (0, 1).
        NumericError: if the iteration fails its accuracy contract.
    """
    if not nu > 0:
        raise ConfigError(f"nu must be > 0, got {nu}")
    p_in = np.asarray(p, dtype=float)
    p = np.atleast_1d(p_in).astype(float).ravel()
    if p.size and ((p <= 0).any() or (p >= 1).any()):
        raise ConfigError("quantile probabilities must lie in (0, 1)")

    lo = np.full(p.shape, -1.0)
    hi = np.full(p.shape, 1.0)
    idx = np.arange(p.size)
    for _ in range(1100):
        grow = idx[t_cdf_1d(lo[idx], nu) > p[idx]]
        if grow.size == 0:
            break
        lo[grow] *= 2.0
        idx = grow
    else:
        raise NumericError("t quantile bracket expansion failed (lower)")
    idx = np.arange(p.size)
    for _ in range(1100):
        grow = idx[t_cdf_1d(hi[idx], nu) < p[idx]]
        if grow.size == 0:
            break
        hi[grow] *= 2.0
        idx = grow
    else:
        raise NumericError("t quantile bracket expansion failed (upper)")

    x = 0.5 * (lo + hi)
    # lower tail: relative criterion (the cdf's tail branch carries full
    # relative precision there); elsewhere: absolute, at the granularity
    # the cdf difference can resolve near 1/2 and 1
    tol = np.where(p <= 0.25, np.maximum(1e-13 * p, 5e-324), 1e-15)
    # safeguarded Newton, shrinking the working set as points converge
    active = np.arange(p.size)
    for _ in range(80):
        xa = x[active]
        f = t_cdf_1d(xa, nu) - p[active]
        live = np.abs(f) > tol[active]
        if not live.all():
            active = active[live]
            if active.size == 0:
                break
            xa, f = xa[live], f[live]
        la, ha = lo[active], hi[active]
        la = np.where(f < 0, xa, la)
        ha = np.where(f > 0, xa, ha)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - f / _t_pdf_1d(xa, nu)
        inside = np.isfinite(xn) & (xn > la) & (xn < ha)
        lo[active], hi[active] = la, ha
        x[active] = np.where(inside, xn, 0.5 * (la + ha))
    err = np.abs(t_cdf_1d(x, nu) - p)
    if (err > 1e-12).any():
        raise NumericError(
            f"t quantile did not meet |cdf(q)-p| <= 1e-12 (worst {err.max():.3e})")
    if np.ndim(p_in) == 0:
        return float(x[0])
    return x.reshape(np.shape(p_in))


def _tanh_sinh_nodes(h: float):
    """Abscissas/weights approximating integral_0^1 g(z) dz for smooth g
    with possible algebraic endpoint singularities."""
    jmax = int(np.ceil(np.arcsinh(90.0 / np.pi) / h))
    j = np.arange(-jmax, jmax + 1)
    q = 0.5 * np.pi * np.sinh(j * h)
    zeta = 0.5 * (1.0 + np.tanh(q))
    w = h * 0.25 * np.pi * np.cosh(j * h) / np.cosh(q) ** 2
    keep = (zeta > 1e-17) & (zeta < 1.0 - 1e-17) & (w > 1e-19)
    return zeta[keep], w[keep]


_TS_LEVELS = tuple(_tanh_sinh_nodes(h) for h in (0.16, 0.08, 0.04, 0.02))


def _t_copula_interior(u, v, nu, rho, level):
    """Fixed-node tanh-sinh evaluation of C(u,v) = integral_0^u T_{nu+1}(...) dw."""
    zeta, w8 = _TS_LEVELS[level]
    qv = t_quantile_1d(v, nu)
    scale = math.sqrt((1.0 - rho * rho) / (nu + 1.0))
    # nodes in w-space, per evaluation point: w = u * zeta
    wn = u[None, :] * zeta[:, None]
    x = t_quantile_1d(wn.ravel(), nu).reshape(wn.shape)
    s = scale * np.sqrt(nu + x * x)
    cond = t_cdf_1d((qv[None, :] - rho * x) / s, nu + 1.0)
    return u * np.einsum("i,ij->j", w8, cond)


def t_copula_cdf(u, v, nu: float, rho: float):
    """Bivariate t copula cdf at (u, v), absolute accuracy <= 1e-9.

    The copula is the bivariate t cdf at the coordinatewise t quantiles; it
    is computed as a 1-D integral of the conditional distribution, which is
    again univariate t:

        C(u, v) = integral_0^u T_{nu+1}( (q_v - rho x) / s(x) ) dw,
        x = Q_nu(w),  s(x) = sqrt( (nu + x^2)(1 - rho^2) / (nu + 1) ).

    The integral runs over fixed tanh-sinh nodes at two step sizes; their
    disagreement is the error estimate, one refinement is attempted, and
    persistent disagreement raises :class:`NumericError`.  Boundary values
    (any coordinate 0 or 1) are returned exactly by case split.
    """
    if not nu > 0:
        raise ConfigError(f"nu must be > 0, got {nu}")
    if not -1 < rho < 1:
        raise ConfigError(f"rho must be in (-1, 1), got {rho}")
    u_in = np.asarray(u, dtype=float)
    v_in = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u_in, v_in)
    u = np.atleast_1d(u).astype(float)
    v = np.atleast_1d(v).astype(float)
    shape = u.shape
    u, v = u.ravel(), v.ravel()

    out = np.zeros(u.shape, dtype=float)
    out[u == 1.0] = v[u == 1.0]
    out[v == 1.0] = u[v == 1.0]
    out[(u == 1.0) & (v == 1.0)] = 1.0
    out[(u == 0.0) | (v == 0.0)] = 0.0
    interior = (u > 0) & (u < 1) & (v > 0) & (v < 1)
    if interior.any():
        ui, vi = u[interior], v[interior]
        coarse = _t_copula_interior(ui, vi, nu, rho, 0)
        fine = _t_copula_interior(ui, vi, nu, rho, 1)
        err = np.abs(fine - coarse)
        vals = fine
        bad = err > 1e-9
        if bad.any():
            vals = fine.copy()
            finest = _t_copula_interior(ui[bad], vi[bad], nu, rho, 2)
            err2 = np.abs(finest - fine[bad])
            vals[bad] = finest
            still = err2 > 1e-9
            if still.any():
                us, vs = ui[bad][still], vi[bad][still]
                deepest = _t_copula_interior(us, vs, nu, rho, 3)
                err3 = np.abs(deepest - finest[still])
                if (err3 > 1e-9).any():
                    worst = int(np.argmax(err3))
                    raise NumericError(
                        "t copula quadrature did not converge to 1e-9: "
                        f"u={us[worst]:.6g} v={vs[worst]:.6g} nu={nu} rho={rho} "
                        f"step-halving disagreement {err3.max():.3e}")
                sub = vals[bad]
                sub[still] = deepest
                vals[bad] = sub
        out[interior] = vals
    out = out.reshape(shape)
    if u_in.ndim == 0 and v_in.ndim == 0:
        return float(out.reshape(())[()])
    return out


def t_ev_pickands(t, nu: float, rho: float):
    """Pickands function of the extreme-value limit of the t copula.

    A(t) = t T_{nu+1}(z_t) + (1-t) T_{nu+1}(z_{1-t}),
    z_t = sqrt(1+nu) [ (t/(1-t))^(1/nu) - rho ] / sqrt(1-rho^2),
    with A(0) = A(1) = 1 by continuity.
    """
    if not nu > 0:
        raise ConfigError(f"nu must be > 0, got {nu}")
    if not -1 < rho < 1:
        raise ConfigError(f"rho must be in (-1, 1), got {rho}")
    t_in = np.asarray(t, dtype=float)
    t = np.atleast_1d(t_in).astype(float)
    out = np.ones(t.shape, dtype=float)
    inner = (t > 0) & (t < 1)
    ti = t[inner]
    c = math.sqrt(1.0 + nu) / math.sqrt(1.0 - rho * rho)
    zt = c * (np.power(ti / (1.0 - ti), 1.0 / nu) - rho)
    zt1 = c * (np.power((1.0 - ti) / ti, 1.0 / nu) - rho)
    out[inner] = ti * t_cdf_1d(zt, nu + 1.0) + (1.0 - ti) * t_cdf_1d(zt1, nu + 1.0)
    if t_in.ndim == 0:
        return float(out[0])
    return out.reshape(t_in.shape)


def copula_from_pickands(pickands_fn: Callable, u):
    """Extreme-value copula built from a Pickands dependence function.

    C(u) = exp{ S * A(log u_2 / S, ..., log u_d / S) },  S = sum_j log u_j,
    with the boundary fixed by continuity: 0 if any coordinate is 0, and the
    product over the remaining coordinates when some coordinate is 1 (that
    case needs no special handling: log 1 = 0 simply moves the evaluation
    point of A onto the induced sub-simplex face).

    Args:
        pickands_fn: A(t); receives t of shape (...,) for d = 2 and
            (..., d-1) for d > 2.
        u: evaluation points, shape (..., d).
    """
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    out = np.ones(u.shape[:-1], dtype=float)
    any_zero = (u == 0).any(axis=-1)
    all_one = (u == 1).all(axis=-1)
    inner = ~(any_zero | all_one)
    out[any_zero] = 0.0
    if np.any(inner):
        with np.errstate(divide="ignore"):
            logs = np.log(u[inner])
        ssum = logs.sum(axis=-1)
        tpts = logs[..., 1:] / ssum[..., None]
        if d == 2:
            avals = np.asarray(pickands_fn(tpts[..., 0]), dtype=float)
        else:
            avals = np.asarray(pickands_fn(tpts), dtype=float)
        out[inner] = np.exp(ssum * avals)
    return out if out.ndim else float(out)


def _opc_log_partial(u, v, theta: float, beta: float):
    """log of dC/du for the OPC copula (the conditional cdf of V given U=u).

    With X = (u^-theta - 1)^beta, Y likewise and S = X + Y:
        dC/du = (1 + S^(1/beta))^(-1/theta - 1) (S/X)^(1/beta - 1) u^(-1-theta).
    Computed fully in log space so extreme u, v stay finite.
    """
    log_u = np.log(u)
    log_v = np.log(v)
    log_x = beta * np.log(np.expm1(-theta * log_u))
    log_y = beta * np.log(np.expm1(-theta * log_v))
    log_s = np.logaddexp(log_x, log_y)
    log_s_pow = log_s / beta
    # log1p(exp(z)) evaluated stably for any z
    log1p_s = np.logaddexp(0.0, log_s_pow)
    return (-1.0 / theta - 1.0) * log1p_s + (1.0 / beta - 1.0) * (log_s - log_x) \
        - (1.0 + theta) * log_u


def _gumbel_log_partial(u, v, beta: float):
    """log of dC/du for the Gumbel copula: (C/u) S^(1/beta-1) (-log u)^(beta-1)."""
    xt = -np.log(u)
    yt = -np.log(v)
    log_s = np.logaddexp(beta * np.log(xt), beta * np.log(yt))
    s_pow = np.exp(log_s / beta)
    return -s_pow + (1.0 / beta - 1.0) * log_s + (beta - 1.0) * np.log(xt) - np.log(u)


def _invert_conditional(log_partial: Callable, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Solve dC/du(u, v) = w for v by bisection, tolerance 1e-12 on v.

    The conditional cdf v -> dC/du(u, v) is continuous and strictly
    increasing from 0 to 1, so the bracket (0, 1) is always valid; an
    invalid (NaN) evaluation means the partial is broken and raises.
    """
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    log_w = np.log(w)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        h = log_partial(u, mid)
        if np.isnan(h).any():
            raise NumericError("conditional-inversion bisection hit an invalid "
                               "partial-derivative value (non-monotone bracket)")
        smaller = h < log_w
        lo = np.where(smaller, mid, lo)
        hi = np.where(smaller, hi, mid)
    return 0.5 * (lo + hi)


def sample(spec: CopulaSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. points in (0,1)^d with joint cdf ``spec``.

    OPC/Gumbel use the conditional-distribution method: U uniform, then V
    solves dC/du(U, V) = W for an independent uniform W, with the analytic
    partial derivative and bisection to 1e-12.  The t copula uses its
    stochastic representation (correlated normals over a chi-square root),
    mapped through the univariate t cdf.

    Args:
        spec: the copula; opc/gumbel/t require d = 2.
        n: number of draws, >= 1.
        rng: a seeded numpy Generator; the only state touched.
    """
    if n < 1:
        raise ConfigError(f"sample size must be >= 1, got {n}")
    if spec.family == "independence":
        out = rng.random((n, spec.d))
        # keep draws in the open interval
        return np.clip(out, np.nextafter(0.0, 1.0), None)
    if spec.family in ("opc", "gumbel"):
        u = rng.random(n)
        w = rng.random(n)
        u = np.clip(u, np.nextafter(0.0, 1.0), None)
        w = np.clip(w, np.nextafter(0.0, 1.0), None)
        if spec.family == "opc":
            log_partial = partial(_opc_log_partial, theta=spec.theta, beta=spec.beta)
        else:
            log_partial = partial(_gumbel_log_partial, beta=spec.beta)
        v = _invert_conditional(log_partial, u, w)
        return np.column_stack([u, v])
    if spec.family == "t":
        z = rng.standard_normal((n, 2))
        z[:, 1] = spec.rho * z[:, 0] + math.sqrt(1.0 - spec.rho**2) * z[:, 1]
        g = rng.chisquare(spec.nu, size=n)
        x = z * np.sqrt(spec.nu / g)[:, None]
        out = t_cdf_1d(x, spec.nu)
        return np.clip(out, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    raise ConfigError(f"sampling is not implemented for family {spec.family!r}")


def tail_dependence(spec: CopulaSpec) -> float:
    """Upper tail-dependence coefficient of the family (forward map)."""
    if spec.family in ("opc", "gumbel"):
        return 2.0 - 2.0 ** (1.0 / spec.beta)
    if spec.family == "t":
        z = math.sqrt((spec.nu + 1.0) * (1.0 - spec.rho) / (1.0 + spec.rho))
        return float(2.0 * t_cdf_1d(-z, spec.nu + 1.0))
    if spec.family == "independence":
        return 0.0
    raise ConfigError(f"no tail-dependence formula for family {spec.family!r}")


def tdc_to_param(family: str, lam: float, nu: float | None = None) -> float:
    """Map a target upper tail-dependence coefficient to the family parameter.

    Gumbel/OPC: beta = log 2 / log(2 - lambda), inverting lambda = 2 - 2^(1/beta).
    t copula: the rho solving lambda = 2 T_{nu+1}(-sqrt((nu+1)(1-rho)/(1+rho))),
    found by bisection on (-1, 1) to tolerance 1e-10 (verified on the
    forward map).
    """
    if not 0 < lam < 1:
        raise ConfigError(f"tail-dependence coefficient must be in (0, 1), got {lam}")
    if family in ("opc", "gumbel"):
        return math.log(2.0) / math.log(2.0 - lam)
    if family == "t":
        if nu is None or not nu > 0:
            raise ConfigError(f"t family needs nu > 0, got {nu}")

        def forward(rho: float) -> float:
            z = math.sqrt((nu + 1.0) * (1.0 - rho) / (1.0 + rho))
            return float(2.0 * t_cdf_1d(-z, nu + 1.0))

        lo, hi = -1.0 + 1e-15, 1.0 - 1e-15
        # forward is increasing in rho, from ~0 toward 1
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if forward(mid) < lam:
                lo = mid
            else:
                hi = mid
        rho = 0.5 * (lo + hi)
        if abs(forward(rho) - lam) > 1e-10:
            raise NumericError(
                f"tail-dependence inversion missed tolerance at lambda={lam}, nu={nu}")
        return rho
    raise ConfigError(f"no tail-dependence mapping for family {family!r}")


def rate_check(theta: float, beta: float, m_list, grid_size: int = 21) -> list[tuple[int, float]]:
    """Sup-norm distance between m{C_(theta/m) - C_0} and theta*Gamma_beta.

    Evaluated over a grid_size x grid_size uniform grid on [0,1]^2 for each
    m; the sequence should decrease roughly like 1/m.

    Returns:
        list of (m, sup_error) pairs in the order of ``m_list``.
    """
    _check_opc_params(theta, beta)
    grid = np.linspace(0.0, 1.0, grid_size)
    uu, vv = np.meshgrid(grid, grid, indexing="ij")
    g0 = gumbel_cdf(uu, vv, beta)
    drift = theta * gamma_beta_drift(uu, vv, beta)
    report = []
    for m in m_list:
        if not m >= 1:
            raise ConfigError(f"rate-check m values must be >= 1, got {m}")
        diff = m * (opc_cdf(uu, vv, theta / m, beta) - g0)
        report.append((int(m), float(np.max(np.abs(diff - drift)))))
    return report
