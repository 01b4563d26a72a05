"""Spectral clustering of the most negative adjacency eigenvectors."""

from __future__ import annotations

import itertools

import numpy as np

from ..graph import Coloring, Graph
from ..rng import as_rng
from ..spectral import bottom_eigenvectors
from .params import ClusteringFailed, PipelineParams, estimate_degree


def _embedding(G: Graph, dims: int, seed) -> np.ndarray:
    sd = bottom_eigenvectors(G, dims, seed=seed)
    if sd.eigenvalues[-1] > -1e-9:
        # no negative spectrum at all: nothing to cluster on
        raise ClusteringFailed("graph has no negative eigenvalues")
    return sd.eigenvectors


def _assign(E: np.ndarray, centers, radius2: float) -> tuple[np.ndarray, np.ndarray]:
    D = ((E[:, None, :] - E[centers][None, :, :]) ** 2).sum(axis=2)
    member = D < radius2
    hits = member.sum(axis=1)
    label = np.where(hits == 1, member.argmax(axis=1) + 1, 0)
    sizes = np.bincount(label, minlength=len(centers) + 1)[1:]
    return label, sizes


def spectral_clustering(G: Graph, params: PipelineParams | None = None, d: float | None = None,
                        seed=None, return_attempts: bool = False):
    """Three-way clustering from the two most negative eigenvectors.

    Triplets of centers are sampled at random; a vertex joins ``S_i`` when its
    squared embedding distance to center ``i`` is below ``1/(a n)``, and is
    dropped if it matches two centers.  The first triplet passing the size and
    coverage tests wins; unmatched vertices get color 1.
    """
    p = params or PipelineParams()
    n = G.n
    if n < 3:
        raise ClusteringFailed("need at least three vertices")
    dd = d if d is not None else estimate_degree(G, 3, params=p)
    rng = as_rng(seed)
    E = _embedding(G, 2, rng)
    radius2 = 1.0 / (p.cluster_constant * n)
    min_size = (1 / 3 - p.cluster_size_slack) * n
    min_cover = n - p.coverage_slack * n / dd if dd > 0 else n
    if p.exhaustive_triplets:
        if n > 60:
            raise ValueError("exhaustive triplet mode is limited to n <= 60")
        candidates = itertools.combinations(range(n), 3)
    else:
        candidates = (rng.choice(n, 3, replace=False) for _ in range(p.triplet_attempt_cap))
    attempts = 0
    for centers in candidates:
        attempts += 1
        label, sizes = _assign(E, list(centers), radius2)
        if sizes.min() >= min_size and sizes.sum() >= min_cover:
            C = Coloring(3, np.where(label == 0, 1, label))
            return (C, attempts) if return_attempts else C
    raise ClusteringFailed(f"no accepted triplet after {attempts} attempts")


def spectral_k_clustering(G: Graph, k: int, params: PipelineParams | None = None,
                          d: float | None = None, seed=None, return_attempts: bool = False):
    """k-way clustering from the k-1 most negative eigenvectors.

    Samples k centers; rejects the sample when two centers are within
    squared distance ``4/(c1 n)``; otherwise builds ``S_i`` with radius
    ``1/(c1 n)`` and accepts when every ``|S_i| >= (1/k - 1/(c2 d^(2c))) n``.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    p = params or PipelineParams()
    n = G.n
    if n < k:
        raise ClusteringFailed("fewer vertices than clusters")
    dd = d if d is not None else estimate_degree(G, k, params=p)
    rng = as_rng(seed)
    E = _embedding(G, k - 1, rng)
    c1 = p.c1(k)
    radius2 = 1.0 / (c1 * n)
    sep2 = 4.0 / (c1 * n)
    min_size = (1 / k - 1 / (p.k_cluster_c2 * dd ** (2 * p.k_cluster_c))) * n if dd > 0 else n
    for attempts in range(1, p.triplet_attempt_cap + 1):
        centers = rng.choice(n, k, replace=False)
        P = E[centers]
        gaps = ((P[:, None, :] - P[None, :, :]) ** 2).sum(axis=2)
        if np.any(gaps[np.triu_indices(k, 1)] < sep2):
            continue
        label, sizes = _assign(E, list(centers), radius2)
        if sizes.min() >= min_size:
            C = Coloring(k, np.where(label == 0, 1, label))
            return (C, attempts) if return_attempts else C
    raise ClusteringFailed(f"no accepted sample after {p.triplet_attempt_cap} attempts")
