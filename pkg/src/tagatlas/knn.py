"""Exact cosine nearest neighbors over a hashtag atlas.

Similarities for a query are bit-identical to calling `cosine` on each row
because both paths go through the same compiled dot kernel with the same
sequential accumulation order (platform BLAS reductions do not have that
property). That makes top_k testable against a naive full-sort oracle with
zero tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .atlas import HashtagAtlas
from .errors import UnknownHashtag


@njit(cache=True, nogil=True)
def _dot(u, v):
    acc = 0.0
    for d in range(u.shape[0]):
        acc += u[d] * v[d]
    return acc


@njit(cache=True, nogil=True)
def _cosine(u, v):
    nu = np.sqrt(_dot(u, u))
    nv = np.sqrt(_dot(v, v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return _dot(u, v) / (nu * nv)


@njit(cache=True, nogil=True)
def _norms(mat):
    out = np.empty(mat.shape[0], dtype=np.float64)
    for i in range(mat.shape[0]):
        out[i] = np.sqrt(_dot(mat[i], mat[i]))
    return out


@njit(cache=True, nogil=True)
def _sims(mat, norms, q, qnorm):
    out = np.empty(mat.shape[0], dtype=np.float64)
    for i in range(mat.shape[0]):
        if norms[i] == 0.0 or qnorm == 0.0:
            out[i] = 0.0
        else:
            out[i] = _dot(mat[i], q) / (norms[i] * qnorm)
    return out


def cosine(u, v) -> float:
    """u.v / (|u||v|); 0 when either norm is 0."""
    u = np.ascontiguousarray(u)
    v = np.ascontiguousarray(v)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"expected equal-length vectors, got {u.shape} and {v.shape}")
    return float(_cosine(u, v))


def row_norms(mat: np.ndarray) -> np.ndarray:
    return _norms(np.ascontiguousarray(mat))


def normalize_tag(tag: str) -> str:
    """Lowercase and ensure a single leading '#' ('%23' accepted as '#')."""
    t = tag.strip().lower()
    if t.startswith("%23"):
        t = t[3:]
    elif t.startswith("#"):
        t = t[1:]
    return "#" + t


@dataclass(frozen=True)
class Neighbor:
    tag: str
    similarity: float
    x: float
    y: float


@dataclass(frozen=True)
class NeighborResult:
    query: str
    query_point: tuple[float, float]
    neighbors: list[Neighbor]


def top_k(atlas: HashtagAtlas, query_tag: str, k: int) -> NeighborResult:
    """Exact top-k by cosine over atlas.vectors, query row excluded.

    Neighbors come back sorted by descending similarity, ties broken
    lexicographically; atlas tags are sorted, so index order is tag order
    and a stable sort on similarity settles ties for free.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tag = normalize_tag(query_tag)
    idx = atlas.index.get(tag)
    if idx is None:
        raise UnknownHashtag(tag)
    n = len(atlas)
    m = min(k, n - 1)
    sims = _sims(atlas.vectors, atlas.norms, atlas.vectors[idx], atlas.norms[idx])
    sims[idx] = -np.inf
    neg = -sims
    if m == n - 1:
        order = np.argsort(neg, kind="stable")[:m]
    else:
        # boundary value, then stable-sort only the candidates at or above it
        kth = np.partition(neg, m - 1)[m - 1]
        cand = np.flatnonzero(neg <= kth)
        order = cand[np.argsort(neg[cand], kind="stable")][:m]
    neighbors = [Neighbor(atlas.tags[i], float(sims[i]),
                          float(atlas.coords[i, 0]), float(atlas.coords[i, 1]))
                 for i in order]
    qpoint = (float(atlas.coords[idx, 0]), float(atlas.coords[idx, 1]))
    return NeighborResult(query=tag, query_point=qpoint, neighbors=neighbors)
