"""Clustering kernels on 2-D point sets: k-means, agglomerative, DBSCAN.

All three are deterministic. Labels come back in canonical form (clusters
numbered by first appearance in point order) so equal partitions compare
equal as arrays.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import TooFewPoints
from .model import NOISE, Clustering, Method, PointSet, canonical_labels


class Linkage(str, enum.Enum):
    WARD = "WARD"
    COMPLETE = "COMPLETE"
    AVERAGE = "AVERAGE"
    SINGLE = "SINGLE"


@dataclass(frozen=True)
class KMeansParams:
    k: int
    restarts: int = 10
    max_iterations: int = 300
    convergence_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class AgglomerativeParams:
    k: int
    linkage: Linkage = Linkage.WARD

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        object.__setattr__(self, "linkage", Linkage(self.linkage))


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_points: int = 4

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.min_points < 1:
            raise ValueError("min_points must be >= 1")


def euclidean(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def pairwise_distances(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _as_array(points) -> np.ndarray:
    if isinstance(points, PointSet):
        return points.points
    return np.asarray(points, dtype=float).reshape(-1, 2)


def inertia(points, labels) -> float:
    """Within-cluster sum of squared distances to the cluster means."""
    x = _as_array(points)
    labels = np.asarray(labels)
    total = 0.0
    for c in np.unique(labels[labels != NOISE]):
        m = x[labels == c]
        total += float(np.sum((m - m.mean(axis=0)) ** 2))
    return total


# --- k-means ---------------------------------------------------------------

def kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each new center drawn with probability proportional to D^2."""
    n = len(x)
    centers = np.empty((k, 2))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[c] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1)


def _repair_empty(x: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    # Move the point farthest from its own centroid into each empty cluster,
    # never emptying a donor cluster.
    labels = labels.copy()
    for c in range(k):
        if np.any(labels == c):
            continue
        counts = np.bincount(labels, minlength=k)
        d2 = np.sum((x - centers[labels]) ** 2, axis=1)
        d2[counts[labels] < 2] = -1.0
        idx = int(np.argmax(d2))
        labels[idx] = c
        centers[c] = x[idx]
    return labels


def _centroids(x: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    centers = np.empty((k, 2))
    for c in range(k):
        centers[c] = x[labels == c].mean(axis=0)
    return centers


def lloyd(x: np.ndarray, centers: np.ndarray, max_iterations: int = 300, tol: float = 1e-6):
    """Run Lloyd iterations from the given centers.

    Returns ``(labels, centers, history)`` where ``history`` holds the
    inertia after each iteration.
    """
    k = len(centers)
    centers = np.array(centers, dtype=float)
    history = []
    for _ in range(max(1, max_iterations)):
        labels = _repair_empty(x, _assign(x, centers), centers, k)
        new = _centroids(x, labels, k)
        shift = float(np.sum((new - centers) ** 2))
        centers = new
        history.append(float(np.sum((x - centers[labels]) ** 2)))
        if shift <= tol:
            break
    return labels, centers, history


def kmeans(points, params: KMeansParams) -> Clustering:
    x = _as_array(points)
    n = len(x)
    if params.k > n:
        raise TooFewPoints(f"k={params.k} exceeds point count {n}")
    seeds = np.random.SeedSequence(params.seed).spawn(params.restarts)
    best_labels, best_inertia = None, np.inf
    for ss in seeds:
        rng = np.random.default_rng(ss)
        centers = kmeanspp_init(x, params.k, rng)
        labels, centers, _ = lloyd(x, centers, params.max_iterations, params.convergence_tol)
        value = float(np.sum((x - centers[labels]) ** 2))
        if value < best_inertia:
            best_labels, best_inertia = labels, value
    return Clustering(Method.KMEANS, params, canonical_labels(best_labels), params.k)


# --- agglomerative ---------------------------------------------------------

def _lance_williams(linkage: Linkage, d_ik, d_jk, d_ij, n_i, n_j, n_k):
    if linkage is Linkage.SINGLE:
        return np.minimum(d_ik, d_jk)
    if linkage is Linkage.COMPLETE:
        return np.maximum(d_ik, d_jk)
    if linkage is Linkage.AVERAGE:
        return (n_i * d_ik + n_j * d_jk) / (n_i + n_j)
    total = n_i + n_j + n_k
    return ((n_i + n_k) * d_ik + (n_j + n_k) * d_jk - n_k * d_ij) / total


def merge_history(points, linkage: Linkage = Linkage.WARD, stop_at: int = 1):
    """Greedy bottom-up merging until ``stop_at`` clusters remain.

    Returns ``(labels, merges)``. ``merges`` lists ``(i, j, cost)`` with the
    surviving id ``i < j``; ids are the index of each cluster's lowest point.
    Ward costs are in squared-distance units.
    """
    linkage = Linkage(linkage)
    x = _as_array(points)
    n = len(x)
    d = pairwise_distances(x)
    if linkage is Linkage.WARD:
        d = d ** 2
    np.fill_diagonal(d, np.inf)
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    labels = np.arange(n)
    merges = []
    for _ in range(n - stop_at):
        masked = np.where(active[:, None] & active[None, :], d, np.inf)
        flat = int(np.argmin(masked))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        cost = float(d[i, j])
        others = active.copy()
        others[[i, j]] = False
        upd = _lance_williams(linkage, d[i, others], d[j, others], d[i, j], size[i], size[j], size[others])
        d[i, others] = upd
        d[others, i] = upd
        d[j, :] = np.inf
        d[:, j] = np.inf
        size[i] += size[j]
        active[j] = False
        labels[labels == j] = i
        merges.append((i, j, cost))
    return labels, merges


def agglomerative(points, params: AgglomerativeParams) -> Clustering:
    x = _as_array(points)
    if params.k > len(x):
        raise TooFewPoints(f"k={params.k} exceeds point count {len(x)}")
    labels, _ = merge_history(x, params.linkage, params.k)
    return Clustering(Method.AGGLOMERATIVE, params, canonical_labels(labels), params.k)


# --- DBSCAN ----------------------------------------------------------------

def dbscan(points, params: DbscanParams) -> Clustering:
    """Density-based clustering.

    A point is core when at least ``min_points`` points (itself included) lie
    within ``eps`` (inclusive). Clusters are expanded from unvisited core
    points in index order, so a border point reachable from several clusters
    joins the one seeded from the lowest index.
    """
    x = _as_array(points)
    n = len(x)
    neighbors = pairwise_distances(x) <= params.eps
    core = neighbors.sum(axis=1) >= params.min_points
    labels = np.full(n, NOISE, dtype=np.int64)
    k = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        labels[seed] = k
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            if not core[p]:
                continue
            for q in np.flatnonzero(neighbors[p]):
                if labels[q] == NOISE:
                    labels[q] = k
                    queue.append(q)
        k += 1
    return Clustering(Method.DBSCAN, params, canonical_labels(labels), k)
