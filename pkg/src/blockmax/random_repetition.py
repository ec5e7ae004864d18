"""Random-repetition processes: serial dependence with ties among maxima.

The process repeats its previous value with probability 1 - theta and draws a
fresh innovation vector otherwise:

    X_t = xi_t if I_t = 1,   X_{t-1} if I_t = 0,      Pr(I_t = 1) = theta.

Repetition copies whole rows, so block maxima of nearby blocks can tie
exactly — the stress case that separates the rank-based empirical copula
from its order-statistic variant.  The block-maximum cdf has the closed form
F_m = F_1 [1 - theta (1 - F_1)]^{m-1}, the chain is phi-mixing with an
explicit geometric bound, and the block-maxima copula converges to the
extreme-value attractor of the innovation copula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._errors import ConfigError
from .block_empirics import empirical_copula, extract_block_maxima, pseudo_observations
from .copulas import CopulaSpec, ev_attractor, sample

__all__ = [
    "RepetitionConfig",
    "simulate",
    "closed_form_fm",
    "beta_mixing_bound",
    "cm_limit_check",
]


@dataclass(frozen=True)
class RepetitionConfig:
    """Escape probability and innovation law of a random-repetition process.

    Attributes:
        theta: probability of drawing a fresh innovation, in (0, 1];
            theta = 1 recovers i.i.d. sampling from ``base`` exactly.
        base: copula of the innovation vectors xi_t (uniform margins).
    """

    theta: float
    base: CopulaSpec

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ConfigError(f"theta must lie in (0, 1], got {self.theta}")

    @property
    def d(self) -> int:
        return self.base.d


def simulate(config: RepetitionConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a stationary path of length ``n`` (uniform margins).

    The innovations are drawn first, in one block, so that theta = 1
    reproduces ``sample(config.base, n, rng)`` bitwise from the same
    generator state; the Bernoulli indicators and the stationary seed row
    X_0 consume randomness only after that.
    """
    if n < 1:
        raise ConfigError(f"need n >= 1, got {n}")
    xi = sample(config.base, n, rng)
    fresh = rng.random(n) < config.theta
    x0 = sample(config.base, 1, rng)
    rows = np.vstack([x0, xi])
    # index of the most recent fresh row at or before t (0 = the seed row)
    take = np.maximum.accumulate(np.where(fresh, np.arange(1, n + 1), 0))
    return rows[take]


def closed_form_fm(config: RepetitionConfig, x, m: int) -> np.ndarray | float:
    """Block-maximum cdf F_m(x) = F_1(x) [1 - theta (1 - F_1(x))]^(m-1).

    F_1 is the innovation copula evaluated on copula scale, so the same
    formula yields the margins: F_mj(x_j) = closed_form_fm at
    (1, ..., x_j, ..., 1).

    Args:
        x: points of shape (..., d) with entries in [0, 1].
        m: block length >= 1.
    """
    if m < 1:
        raise ConfigError(f"need m >= 1, got {m}")
    f1 = np.asarray(config.base.cdf(np.asarray(x, dtype=float)))
    out = f1 * (1.0 - config.theta * (1.0 - f1)) ** (m - 1)
    return float(out) if out.ndim == 0 else out


def beta_mixing_bound(theta: float, lag: int) -> float:
    """Proven mixing bound 2 (1 - theta)^lag between sigma-fields ``lag`` apart.

    The chain regenerates at every fresh draw, so dependence across a gap of
    ``lag`` steps requires ``lag`` consecutive repetitions; the resulting
    phi-mixing coefficient (which dominates the beta coefficient) is at most
    2 (1 - theta)^lag.
    """
    if not 0.0 < theta <= 1.0:
        raise ConfigError(f"theta must lie in (0, 1], got {theta}")
    if lag < 1:
        raise ConfigError(f"need lag >= 1, got {lag}")
    return 2.0 * (1.0 - theta) ** lag


def cm_limit_check(
    config: RepetitionConfig,
    m: int,
    u,
    k: int = 10_000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float]:
    """Convergence diagnostic: empirical C_m against the innovation attractor.

    Simulates k blocks of length m, forms the rank-based empirical copula of
    the block maxima, and evaluates it at ``u`` next to the extreme-value
    attractor of the innovation copula (the large-m limit of C_m).

    Returns:
        (cm_empirical, c_infinity) at ``u``.
    """
    if m < 1:
        raise ConfigError(f"need m >= 1, got {m}")
    if k < 2:
        raise ConfigError(f"need k >= 2, got {k}")
    if rng is None:
        rng = np.random.default_rng()
    u = np.asarray(u, dtype=float)
    path = simulate(config, m * k, rng)
    pseudo = pseudo_observations(extract_block_maxima(path, m))
    cm_emp = float(np.asarray(empirical_copula(pseudo, u)))
    c_inf = float(np.asarray(ev_attractor(config.base).cdf(u)))
    return cm_emp, c_inf
