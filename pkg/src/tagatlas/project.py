"""2D projection of hashtag vectors: PCA pre-reduction, perplexity-calibrated
affinities, and exact O(N^2) t-SNE gradient descent with early exaggeration,
momentum, and per-parameter gains.

Quadratic memory: P, Q, and the distance matrix are dense N x N float64.
Fine as an offline step up to tens of thousands of hashtags; not a
streaming component.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .atlas import HashtagAtlas
from .embed import EmbeddingModel, compose_input_vector
from .errors import DataError

EXAG_ITERS = 250          # exaggeration and low momentum end here
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
MIN_GAIN = 0.01
P_FLOOR = 1e-12
Q_FLOOR = 1e-12
BETA_LO = 1e-20
BETA_HI = 1e20
CAL_TOL = 1e-5            # |log2 perp - log2 target|
CAL_MAX_ITERS = 200
_SEED_MASK = (1 << 64) - 1
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iters: int = 1000
    exaggeration: float = 12.0
    eta: float = 200.0
    pca_dim: int = 50
    seed: int = 1

    def __post_init__(self):
        if not self.perplexity > 1:
            raise ValueError("perplexity must be > 1")
        if self.iters < 1 or self.pca_dim < 1:
            raise ValueError("iters and pca_dim must be >= 1")
        if self.eta <= 0 or self.exaggeration < 1:
            raise ValueError("eta must be positive and exaggeration >= 1")


@dataclass
class TsneState:
    velocity: np.ndarray
    gains: np.ndarray
    iteration: int = 0

    @classmethod
    def fresh(cls, n: int) -> "TsneState":
        return cls(np.zeros((n, 2)), np.ones((n, 2)), 0)


@dataclass
class TsneStats:
    """Unexaggerated KL after the first and last iterations."""
    kl_first: float = math.nan
    kl_final: float = math.nan


def _sq_dists(x: np.ndarray) -> np.ndarray:
    s = np.einsum("ij,ij->i", x, x)
    d2 = s[:, None] + s[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def pca_reduce(x: np.ndarray, d: int) -> np.ndarray:
    """Project mean-centered x onto its top-d principal components.

    Pass-through (centering only) when x already has <= d columns, however
    large d is. Each component is sign-fixed so its largest-magnitude
    loading is positive, making the output independent of SVD sign
    conventions.
    """
    x = np.asarray(x, dtype=np.float64)
    n, dims = x.shape
    if n < 2:
        raise ValueError("need at least 2 points")
    if d < 1:
        raise ValueError(f"target dim must be >= 1, got {d}")
    centered = x - x.mean(axis=0)
    if dims <= d:
        return centered
    if d > n:
        raise ValueError(f"cannot project {n} points onto {d} components")
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:d]
    flip = comps[np.arange(d), np.argmax(np.abs(comps), axis=1)] < 0
    comps[flip] *= -1.0
    return centered @ comps.T


def conditional_affinities(x: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-calibrated conditionals p_{j|i} and the precisions beta_i.

    Per row, beta is bisected over [1e-20, 1e20] (at most 200 steps) until
    the row's perplexity matches the target within 1e-5 in log2; rows that
    cannot reach it (e.g. all-equidistant) keep the best bisection value.
    A target above (N-1)/3 is clamped with a warning.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points to calibrate")
    target = float(perplexity)
    limit = (n - 1) / 3.0
    if target > limit:
        warnings.warn(f"perplexity {target:g} too large for {n} points; "
                      f"clamped to {limit:g}", RuntimeWarning, stacklevel=2)
        target = limit
    log2_target = math.log2(target)
    d2 = _sq_dists(x)
    cond = np.zeros((n, n))
    betas = np.empty(n)
    for i in range(n):
        e = d2[i].copy()
        e[i] = np.inf
        e -= e.min()            # shift so the closest point has weight 1
        e[i] = 0.0              # self weight zeroed after exp
        lo, hi = BETA_LO, BETA_HI
        beta = 1.0
        w = np.empty(n)
        sumw = 1.0
        for _ in range(CAL_MAX_ITERS):
            beta = 0.5 * (lo + hi)
            np.exp(-beta * e, out=w)
            w[i] = 0.0
            sumw = w.sum()
            h_bits = math.log2(sumw) + beta * (w @ e) / sumw / _LN2
            diff = h_bits - log2_target
            if abs(diff) < CAL_TOL:
                break
            if diff > 0:        # spread too wide: sharpen
                lo = beta
            else:
                hi = beta
        cond[i] = w / sumw
        cond[i, i] = 0.0
        betas[i] = beta
    return cond, betas


def calibrate_affinities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinities: p_ij = (p_{j|i} + p_{i|j}) / 2N, floored at
    1e-12 off-diagonal, zero diagonal."""
    cond, _ = conditional_affinities(x, perplexity)
    n = cond.shape[0]
    p = (cond + cond.T) / (2.0 * n)
    np.maximum(p, P_FLOOR, out=p)
    np.fill_diagonal(p, 0.0)
    return p


def _q_matrix(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = 1.0 / (1.0 + _sq_dists(y))
    np.fill_diagonal(w, 0.0)
    q = np.maximum(w / w.sum(), Q_FLOOR)
    np.fill_diagonal(q, 0.0)
    return w, q


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def tsne_step(y: np.ndarray, p: np.ndarray, config: TsneConfig,
              state: TsneState) -> tuple[np.ndarray, float]:
    """One in-place gradient step on y; returns (y, KL(P'||Q)).

    P' is p scaled by the exaggeration factor while state.iteration is in
    the exaggeration phase. Gains shrink (x0.8) where gradient and velocity
    agree in sign and grow (+0.2) elsewhere, floored at 0.01.
    """
    w, q = _q_matrix(y)
    exag = config.exaggeration if state.iteration < EXAG_ITERS else 1.0
    pp = p * exag if exag != 1.0 else p
    m = (pp - q) * w
    grad = 4.0 * (m.sum(axis=1)[:, None] * y - m @ y)
    if not np.isfinite(grad).all():
        raise FloatingPointError(
            f"non-finite t-SNE gradient at iteration {state.iteration}")
    agree = np.sign(grad) == np.sign(state.velocity)
    state.gains[agree] *= 0.8
    state.gains[~agree] += 0.2
    np.maximum(state.gains, MIN_GAIN, out=state.gains)
    momentum = MOMENTUM_EARLY if state.iteration < EXAG_ITERS else MOMENTUM_LATE
    state.velocity *= momentum
    state.velocity -= config.eta * state.gains * grad
    y += state.velocity
    y -= y.mean(axis=0)
    state.iteration += 1
    return y, _kl(pp, q)


def run_tsne(vectors: np.ndarray, config: TsneConfig,
             stats: TsneStats | None = None) -> np.ndarray:
    """PCA -> affinity calibration -> config.iters gradient steps.

    Deterministic for a fixed seed; output is zero-mean N x 2.
    """
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points to project")
    x = pca_reduce(x, min(config.pca_dim, n, x.shape[1]))
    p = calibrate_affinities(x, config.perplexity)
    rng = np.random.default_rng(config.seed & _SEED_MASK)
    y = rng.normal(0.0, 1e-4, size=(n, 2))
    state = TsneState.fresh(n)
    for it in range(config.iters):
        y, _ = tsne_step(y, p, config, state)
        if it == 0 and stats is not None:
            stats.kl_first = _kl(p, _q_matrix(y)[1])
    if stats is not None:
        stats.kl_final = _kl(p, _q_matrix(y)[1])
    return y


def build_atlas(model: EmbeddingModel, config: TsneConfig,
                stats: TsneStats | None = None) -> HashtagAtlas:
    """Project every vocabulary hashtag; tags end up lexicographically sorted."""
    ids = model.vocab.hashtag_ids()
    if len(ids) < 3:
        raise DataError(f"too few hashtags to project ({len(ids)}, need 3)")
    order = sorted(ids, key=lambda i: model.vocab.tokens[i])
    tags = [model.vocab.tokens[i] for i in order]
    vectors = np.stack([compose_input_vector(model, i) for i in order])
    coords = run_tsne(vectors, config, stats)
    return HashtagAtlas(tags, vectors.astype(np.float32), coords.astype(np.float32))
