"""Moving-maxima processes: simulation and exact finite-block copula theory.

The order-p moving-maxima process takes i.i.d. innovation vectors W_s with
copula D and uniform margins and sets

    U_{t,j} = max_{i=0..p} W_{t-i,j}^(1/a_ij),      sum_i a_ij = 1,

which again has uniform margins and is p-dependent.  Every distribution in
the block-maxima pipeline then has a closed form: the stationary copula C_1,
the block-maximum margins F_m (pure powers), and the copula C_m of the
block maxima, all products of D evaluated at coordinatewise powers.  A
sandwich inequality pins C_m between powered versions of D, and C_m
converges to the extreme-value attractor of D — which in general differs
from the attractor of C_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import ConfigError
from .copulas import CopulaSpec, sample

__all__ = [
    "MovingMaxConfig",
    "BlockCopulaExponents",
    "two_lag_design",
    "simulate",
    "closed_form_c1",
    "block_exponents",
    "closed_form_cm",
    "sandwich_bounds",
    "attractor_of_c1",
]


@dataclass(frozen=True)
class MovingMaxConfig:
    """Coefficients and innovation law of a moving-maxima process.

    Attributes:
        coeffs: (p+1, d) array; row i holds the lag-i exponents a_ij.
            Entries are nonnegative and every column sums to 1 (to 1e-12).
        innovation: copula of the innovation vectors W_s.
    """

    coeffs: np.ndarray
    innovation: CopulaSpec

    def __post_init__(self) -> None:
        a = np.asarray(self.coeffs, dtype=float)
        if a.ndim != 2:
            raise ConfigError(f"coeffs must be a (p+1, d) matrix, got shape {a.shape}")
        if (a < 0).any():
            raise ConfigError("coefficients must be nonnegative")
        colsum = a.sum(axis=0)
        if np.max(np.abs(colsum - 1.0)) > 1e-12:
            raise ConfigError(f"coefficient columns must sum to 1, got {colsum}")
        if a.shape[1] != self.innovation.d:
            raise ConfigError(
                f"coefficient columns ({a.shape[1]}) must match innovation dimension "
                f"({self.innovation.d})")
        object.__setattr__(self, "coeffs", a)

    @property
    def p(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def d(self) -> int:
        return self.coeffs.shape[1]


def two_lag_design(a: float, b: float, innovation: CopulaSpec) -> MovingMaxConfig:
    """Bivariate order-1 design with contemporaneous weights (a, b).

    Lag-0 coefficients (a, b), lag-1 coefficients (1-a, 1-b); the column
    constraint then holds automatically.
    """
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ConfigError(f"weights must lie in [0, 1], got a={a}, b={b}")
    return MovingMaxConfig(coeffs=np.array([[a, b], [1 - a, 1 - b]]), innovation=innovation)


def simulate(config: MovingMaxConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a stationary path of length ``n`` (uniform margins).

    Draws n + p innovation vectors (p of them burn-in, so the output is
    stationary from the first row) and takes lagged coordinatewise maxima.
    A zero coefficient contributes nothing (w^(1/0) := 0 < any maximum).
    """
    if n < 1:
        raise ConfigError(f"need n >= 1, got {n}")
    p, d = config.p, config.d
    w = sample(config.innovation, n + p, rng)
    with np.errstate(divide="ignore"):
        inv = np.where(config.coeffs > 0, 1.0 / config.coeffs, np.inf)
    out = np.zeros((n, d))
    for i in range(p + 1):
        # W_{t-i} occupies rows p-i .. p-i+n-1 of the innovation buffer
        np.maximum(out, w[p - i : p - i + n] ** inv[i], out=out)
    return out


def _power_product(cdf, u, expo: np.ndarray) -> np.ndarray | float:
    """prod_r cdf(u ** expo[r]) with one batched cdf call.

    Args:
        cdf: vectorized copula cdf taking (..., d) points.
        u: points, shape (..., d).
        expo: (r, d) exponent rows.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != expo.shape[1]:
        raise ConfigError(f"points have dimension {u.shape[-1]}, expected {expo.shape[1]}")
    if (u < 0).any() or (u > 1).any():
        raise ConfigError("points must lie in [0, 1]^d")
    scalar = u.ndim == 1
    pts = u[None, :] if scalar else u
    shaped = expo.reshape((expo.shape[0],) + (1,) * (pts.ndim - 1) + (expo.shape[1],))
    vals = cdf(pts[None, ...] ** shaped)  # (r, ...)
    out = np.prod(vals, axis=0)
    return float(out[0]) if scalar else out


def closed_form_c1(config: MovingMaxConfig, u) -> np.ndarray | float:
    """Stationary copula C_1(u) = prod_{i=0..p} D((u_j^{a_ij})_j).

    A zero coefficient sends its coordinate to u^0 = 1 (no constraint from
    that innovation); grounding at u_j = 0 comes through the lags with
    positive weight, which every column has.
    """
    return _power_product(config.innovation.cdf, u, config.coeffs)


@dataclass(frozen=True)
class BlockCopulaExponents:
    """Exponents of the closed-form block-maximum law at block length m.

    Innovation W_s influences the block {1..m} for the lag window
    i in [max(1-s, 0), min(m-s, p)]; the strongest influence is

        alpha[s, j] = max{a_ij : i in window},     s = 1-p, ..., m,

    giving margins F_mj(x) = x^alpha_dot[j] and the block-maxima copula
    C_m(u) = prod_s D((u_j^{beta[s, j]})_j) with beta = alpha/alpha_dot.
    """

    m: int
    p: int
    s_values: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    @property
    def alpha_dot(self) -> np.ndarray:
        return self.alpha.sum(axis=0)

    @property
    def beta(self) -> np.ndarray:
        return self.alpha / self.alpha_dot


def block_exponents(config: MovingMaxConfig, m: int) -> BlockCopulaExponents:
    """Influence exponents alpha[s, j] for s = 1-p .. m (ascending)."""
    if m < 1:
        raise ConfigError(f"need m >= 1, got {m}")
    p, d = config.p, config.d
    s_values = np.arange(1 - p, m + 1)
    alpha = np.zeros((m + p, d))
    for row, s in enumerate(s_values):
        lo, hi = max(1 - s, 0), min(m - s, p)
        alpha[row] = config.coeffs[lo : hi + 1].max(axis=0)
    return BlockCopulaExponents(m=int(m), p=p, s_values=s_values, alpha=alpha)


def closed_form_cm(config: MovingMaxConfig, m: int, u) -> np.ndarray | float:
    """Copula of block maxima: C_m(u) = prod_s D((u_j^{beta_mjs})_j)."""
    expo = block_exponents(config, m)
    return _power_product(config.innovation.cdf, u, expo.beta)


def sandwich_bounds(config: MovingMaxConfig, m: int, u):
    """Two-sided bound on C_m built from the innovation copula alone.

    With D_r(u) = {D(u_1^{1/r}, ..., u_d^{1/r})}^r:

        (D_{m-p}(u))^((m+p)/(m-p)) <= C_m(u) <= (D_{m+p}(u))^((m-p)/(m+p)),

    computed as D(u^{1/(m-p)})^{m+p} and D(u^{1/(m+p)})^{m-p}.

    Args:
        config: process configuration.
        m: block length, must exceed the order p.
        u: points of shape (..., d).

    Returns:
        (lower, upper) arrays (floats for a single point).

    Raises:
        ConfigError: if m <= p.
    """
    p = config.p
    if m <= p:
        raise ConfigError(f"sandwich needs m > p, got m={m}, p={p}")
    u = np.asarray(u, dtype=float)
    if (u < 0).any() or (u > 1).any():
        raise ConfigError("points must lie in [0, 1]^d")
    scalar = u.ndim == 1
    cdf = config.innovation.cdf
    lower = np.asarray(cdf(u ** (1.0 / (m - p)))) ** (m + p)
    upper = np.asarray(cdf(u ** (1.0 / (m + p)))) ** (m - p)
    if scalar:
        return float(lower), float(upper)
    return lower, upper


def attractor_of_c1(config: MovingMaxConfig, d_infinity, u) -> np.ndarray | float:
    """Extreme-value attractor of C_1: prod_{i=0..p} D_inf((u_j^{a_ij})_j).

    In general this is NOT the large-m limit of C_m (which is D_inf itself):
    taking maxima over time first and across blocks after does not commute
    with the attractor operation.

    Args:
        config: process configuration.
        d_infinity: the innovation copula's attractor — a CopulaSpec or a
            vectorized cdf callable.
        u: points of shape (..., d).
    """
    cdf = d_infinity.cdf if isinstance(d_infinity, CopulaSpec) else d_infinity
    return _power_product(cdf, u, config.coeffs)
