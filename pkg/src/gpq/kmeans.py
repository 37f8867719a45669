"""Deterministic, seeded Lloyd's K-means with k-means++ initialization.

Returns per-cluster means, per-dimension population variances, and
assignments. Results are a pure function of (points, c, seed, max_iter,
rel_tol) and, up to cluster relabeling and float summation order,
independent of the order of input points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .rng import derive_seed, mix64, row_hashes

DEFAULT_MAX_ITER = 100
DEFAULT_REL_TOL = 1e-6


@dataclass(frozen=True)
class ClusterResult:
    centroids: np.ndarray   # (c, d) cluster means
    variances: np.ndarray   # (c, d) per-dimension population variance
    assignments: np.ndarray  # (m,) ints in [0, c)
    objective: float        # sum of squared distances to assigned centroid
    iterations: int


def _to_uniform_open(u64: np.ndarray) -> np.ndarray:
    # (0, 1); strictly positive so exponential keys stay finite and nonzero
    return ((u64 >> np.uint64(11)).astype(np.float64) + 0.5) / 9007199254740992.0


def _init_plus_plus(pts: np.ndarray, c: int, seed: int) -> np.ndarray:
    """k-means++ seeding keyed by per-point content hashes.

    Candidate selection uses exponential-race sampling: each point draws a
    key -log(1-u)/w with w its squared distance to the nearest chosen
    center, and the minimum key wins. Because u depends on the point's
    content hash rather than its position, the multiset of chosen centers
    does not depend on input row order.
    """
    m = pts.shape[0]
    hashes = row_hashes(pts, seed)
    centers = np.empty((c, pts.shape[1]), dtype=np.float64)
    d2 = None
    for step in range(c):
        u = _to_uniform_open(mix64(hashes ^ np.uint64(derive_seed(seed, step))))
        if step == 0:
            key = u
        else:
            with np.errstate(divide="ignore"):
                key = -np.log1p(-u) / d2
            if not np.any(np.isfinite(key)):
                # fewer distinct points than centers: fall back to uniform
                key = u
        idx = int(np.argmin(key))
        centers[step] = pts[idx]
        nd2 = np.sum((pts - centers[step]) ** 2, axis=1)
        d2 = nd2 if d2 is None else np.minimum(d2, nd2)
    return centers


def _assign(pts: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x||^2 term is constant per point; argmin ties resolve to lowest index
    d2 = (np.sum(centroids**2, axis=1)[None, :] - 2.0 * pts @ centroids.T)
    return np.argmin(d2, axis=1)


def _repair_empty(pts, assign, centroids, c):
    """Fill each empty cluster with the point farthest from its centroid,
    drawn from clusters that keep at least one member."""
    while True:
        counts = np.bincount(assign, minlength=c)
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            return assign
        dist = np.sum((pts - centroids[assign]) ** 2, axis=1)
        movable = counts[assign] > 1
        dist = np.where(movable, dist, -np.inf)
        donor = int(np.argmax(dist))
        k = int(empties[0])
        assign[donor] = k
        centroids[k] = pts[donor]


def kmeans(points, c: int, seed: int,
           max_iter: int = DEFAULT_MAX_ITER,
           rel_tol: float = DEFAULT_REL_TOL) -> ClusterResult:
    """Lloyd iterations from k-means++ seeding until the objective's
    relative improvement drops below rel_tol, assignments stabilize, or
    max_iter is reached."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DataError(f"points must be 2-D, got shape {pts.shape}")
    m, d = pts.shape
    if c < 1:
        raise DataError("cluster count must be >= 1")
    if c > m:
        raise DataError(f"cluster count {c} exceeds point count {m}")
    if not np.all(np.isfinite(pts)):
        raise DataError("points contain non-finite values")

    centroids = _init_plus_plus(pts, c, seed)
    assign = np.full(m, -1, dtype=np.int64)
    prev_obj = np.inf
    obj = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        new_assign = _assign(pts, centroids)
        new_assign = _repair_empty(pts, new_assign, centroids, c)
        stable = np.array_equal(new_assign, assign)
        assign = new_assign
        for k in range(c):
            centroids[k] = pts[assign == k].mean(axis=0)
        obj = float(np.sum((pts - centroids[assign]) ** 2))
        assert obj <= prev_obj * (1.0 + 1e-12) + 1e-300
        if stable or (np.isfinite(prev_obj) and prev_obj - obj <= rel_tol * prev_obj):
            break
        prev_obj = obj

    variances = np.zeros((c, d), dtype=np.float64)
    for k in range(c):
        members = pts[assign == k]
        variances[k] = np.mean((members - centroids[k]) ** 2, axis=0)
    return ClusterResult(centroids, variances, assign, obj, it)


def kmeans_best_of(points, c: int, seed: int, restarts: int = 1,
                   max_iter: int = DEFAULT_MAX_ITER,
                   rel_tol: float = DEFAULT_REL_TOL) -> ClusterResult:
    """Best of `restarts` seeded runs (seeds seed+0 .. seed+restarts-1);
    ties go to the lowest restart index."""
    if restarts < 1:
        raise DataError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        res = kmeans(points, c, seed + r, max_iter=max_iter, rel_tol=rel_tol)
        if best is None or res.objective < best.objective:
            best = res
    return best
