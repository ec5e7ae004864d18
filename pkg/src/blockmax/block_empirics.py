"""Block maxima, pseudo-observations, and the empirical copula.

The pipeline: a stationary series of length n is cut into k = floor(n/m)
disjoint blocks of length m (the remainder is dropped), componentwise maxima
are taken within each block, the maxima are ranked into pseudo-observations,
and the empirical copula of those pseudo-observations is the nonparametric
input to the dependence-function estimators.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ._errors import ConfigError

__all__ = [
    "BlockMaxima",
    "PseudoObs",
    "extract_block_maxima",
    "pseudo_observations",
    "empirical_copula",
    "empirical_copula_alt",
    "empcop_known_margins",
    "generalized_inverse",
]


@dataclass(frozen=True)
class BlockMaxima:
    """Componentwise maxima of disjoint blocks.

    Attributes:
        values: array of shape (k, d), row i the maxima of block i.
        m: block length.
        n_used: m * k, the number of observations actually consumed.
    """

    values: np.ndarray
    m: int
    n_used: int

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PseudoObs:
    """Rank-based pseudo-observations of a sample of block maxima.

    Attributes:
        values: array of shape (k, d) with entries in (0, 1].
        divisor: "k" (ranks / k, entries reach 1) or "k+1" (ranks / (k+1)).
        m: block length carried through from the maxima.
    """

    values: np.ndarray
    divisor: str
    m: int

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def extract_block_maxima(x, m: int) -> BlockMaxima:
    """Componentwise maxima over disjoint blocks of length ``m``.

    Args:
        x: array of shape (n, d), one row per time point.
        m: block length, >= 1.  k = floor(n/m) blocks are formed from the
            first m*k rows; the remainder is dropped.

    Raises:
        ConfigError: if m < 1 or fewer than m rows are supplied.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ConfigError(f"expected a 2-d series (n, d), got shape {x.shape}")
    n, d = x.shape
    if m < 1:
        raise ConfigError(f"block length must be >= 1, got {m}")
    k = n // m
    if k == 0:
        raise ConfigError(f"series of length {n} is shorter than one block (m={m})")
    blocks = x[: m * k].reshape(k, m, d)
    return BlockMaxima(values=blocks.max(axis=1), m=int(m), n_used=int(m * k))


def pseudo_observations(maxima: BlockMaxima | np.ndarray, divisor: str = "k") -> PseudoObs:
    """Componentwise maximal ranks scaled into (0, 1].

    Ties receive the maximal rank of their group, so the pseudo-observation
    of x_ij is (1/k) * #{i': x_i'j <= x_ij} when ``divisor="k"`` (resp.
    divided by k+1).  With maximal ranks, the empirical copula evaluated at
    pseudo-observations reproduces empirical joint probabilities exactly.

    Args:
        maxima: BlockMaxima, or a raw (k, d) array.
        divisor: "k" or "k+1".

    Raises:
        ConfigError: on an unknown divisor.
    """
    if divisor not in ("k", "k+1"):
        raise ConfigError(f'divisor must be "k" or "k+1", got {divisor!r}')
    if isinstance(maxima, BlockMaxima):
        vals, m = maxima.values, maxima.m
    else:
        vals = np.asarray(maxima, dtype=float)
        if vals.ndim != 2:
            raise ConfigError(f"expected a (k, d) array, got shape {vals.shape}")
        m = 0
    k = vals.shape[0]
    ranks = rankdata(vals, method="max", axis=0).astype(float)
    denom = k if divisor == "k" else k + 1
    return PseudoObs(values=ranks / denom, divisor=divisor, m=m)


def empirical_copula(pseudo: PseudoObs | np.ndarray, u) -> np.ndarray | float:
    """Empirical copula of the pseudo-observations.

    C_hat(u) = (1/k) * #{i : U_i1 <= u_1, ..., U_id <= u_d}.  The divisor is
    the number of blocks k regardless of how the pseudo-observations were
    scaled.

    Args:
        pseudo: PseudoObs or a raw (k, d) array of points in [0, 1].
        u: evaluation points, shape (..., d).

    Returns:
        array of shape (...,) (or a float for a single point).
    """
    vals = pseudo.values if isinstance(pseudo, PseudoObs) else np.asarray(pseudo, dtype=float)
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    pts = np.atleast_2d(u)
    if pts.shape[-1] != vals.shape[1]:
        raise ConfigError(
            f"evaluation points have dimension {pts.shape[-1]}, data {vals.shape[1]}")
    flat = pts.reshape(-1, pts.shape[-1])
    # (k, q) indicator of all-coordinates-below, averaged over the sample
    below = (vals[:, None, :] <= flat[None, :, :]).all(axis=-1)
    out = below.mean(axis=0)
    out = out.reshape(pts.shape[:-1])
    return float(out[0]) if scalar else out.reshape(u.shape[:-1])


def empirical_copula_alt(maxima: BlockMaxima | np.ndarray, u) -> np.ndarray | float:
    """Empirical copula via order statistics of the raw maxima.

    C_check(u) = (1/k) * #{i : M_ij <= M_(ceil(k u_j)),j  for all j}, with the
    convention that a coordinate with u_j = 0 admits no observation.  Equals
    :func:`empirical_copula` at every point when the margins have no ties.

    Args:
        maxima: BlockMaxima or raw (k, d) array.
        u: evaluation points, shape (..., d), entries in [0, 1].
    """
    vals = maxima.values if isinstance(maxima, BlockMaxima) else np.asarray(maxima, dtype=float)
    k, d = vals.shape
    order = np.sort(vals, axis=0)
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    pts = np.atleast_2d(u).reshape(-1, d)
    # 1-based order-statistic index ceil(u*k); the small shift keeps grid
    # points j/k on index j when u*k lands one ulp above the integer.
    idx = np.ceil(pts * k - 1e-9).astype(int)
    idx = np.maximum(idx, (pts > 0).astype(int))
    positive = idx >= 1
    idx_clip = np.clip(idx, 1, k) - 1
    thresh = np.where(positive, order[idx_clip, np.arange(d)[None, :]], -np.inf)
    below = (vals[:, None, :] <= thresh[None, :, :]).all(axis=-1)
    out = below.mean(axis=0).reshape(np.atleast_2d(u).shape[:-1] if scalar else u.shape[:-1])
    return float(out.reshape(-1)[0]) if scalar else out


def empcop_known_margins(maxima: BlockMaxima | np.ndarray, u, marginal_cdfs) -> np.ndarray | float:
    """Empirical copula using known block-maximum marginal cdfs.

    C_tilde(u) = (1/k) * #{i : F_j(M_ij) <= u_j for all j}; useful as a
    rank-free benchmark when the data-generating margins are available.

    Args:
        maxima: BlockMaxima or raw (k, d) array.
        u: evaluation points, shape (..., d).
        marginal_cdfs: sequence of d callables, each mapping an array of
            maxima to probabilities.
    """
    vals = maxima.values if isinstance(maxima, BlockMaxima) else np.asarray(maxima, dtype=float)
    k, d = vals.shape
    if len(marginal_cdfs) != d:
        raise ConfigError(f"need {d} marginal cdfs, got {len(marginal_cdfs)}")
    transformed = np.column_stack([np.asarray(marginal_cdfs[j](vals[:, j]), dtype=float)
                                   for j in range(d)])
    return empirical_copula(transformed, u)


def generalized_inverse(sample, p, support_min: float = -np.inf) -> np.ndarray | float:
    """Empirical generalized inverse F^{-}(p) = inf{x : F_hat(x) >= p}.

    For p in (0, 1] this is the ceil(p*k)-th order statistic; for p = 0 it
    is ``support_min`` (the infimum over the support, by convention -inf
    unless the caller knows a lower endpoint).

    Args:
        sample: 1-d array of observations.
        p: probabilities in [0, 1], any shape.
        support_min: value returned at p = 0.

    Raises:
        ConfigError: if any p is outside [0, 1] or the sample is empty.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise ConfigError("empty sample")
    p = np.asarray(p, dtype=float)
    if (p < 0).any() or (p > 1).any():
        raise ConfigError("probabilities must lie in [0, 1]")
    scalar = p.ndim == 0
    pf = np.atleast_1d(p)
    idx = np.ceil(pf * x.size).astype(int)
    out = np.where(pf == 0.0, support_min, x[np.clip(idx, 1, x.size) - 1])
    return float(out[0]) if scalar else out.reshape(p.shape)


def maxima_to_csv(maxima: BlockMaxima) -> str:
    """Serialize block maxima as CSV with a ``m,k,d`` comment header."""
    buf = io.StringIO()
    buf.write(f"# m={maxima.m},k={maxima.k},d={maxima.d}\n")
    buf.write(",".join(f"x{j + 1}" for j in range(maxima.d)) + "\n")
    for row in maxima.values:
        buf.write(",".join(f"{v:.16e}" for v in row) + "\n")
    return buf.getvalue()


def maxima_from_csv(text: str) -> BlockMaxima:
    """Inverse of :func:`maxima_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ConfigError("missing block-maxima header comment")
    meta = dict(part.split("=") for part in lines[0].lstrip("# ").split(","))
    m = int(meta["m"])
    data = np.loadtxt(io.StringIO("\n".join(lines[2:])), delimiter=",", ndmin=2)
    return BlockMaxima(values=data, m=m, n_used=m * data.shape[0])
