"""Cluster validity: silhouette coefficient, per-cluster noise metric, elbow eps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import _as_array, pairwise_distances
from .errors import DegenerateClustering, EmptyCluster, TooFewPoints
from .model import NOISE, Clustering, ClusterQuality

EPS_FLOOR = 1e-6
DEFAULT_TAU = 4.0


def silhouette_score(points, clustering) -> float:
    """Mean silhouette over non-noise points.

    Points in singleton clusters contribute 0, as do points whose a(i) and
    b(i) are both zero (duplicate-only clusters).
    """
    labels = np.asarray(clustering.labels if isinstance(clustering, Clustering) else clustering)
    x = _as_array(points)
    keep = labels != NOISE
    x, labels = x[keep], labels[keep]
    ids = np.unique(labels)
    if len(ids) < 2:
        raise DegenerateClustering(f"silhouette needs >= 2 clusters, got {len(ids)}")
    d = pairwise_distances(x)
    onehot = labels[:, None] == ids[None, :]
    sizes = onehot.sum(axis=0)
    # mean distance from each point to every cluster
    sums = d @ onehot
    own = np.searchsorted(ids, labels)
    own_size = sizes[own]
    a = np.where(own_size > 1, sums[np.arange(len(x)), own] / np.maximum(own_size - 1, 1), 0.0)
    means = sums / sizes[None, :]
    means[np.arange(len(x)), own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own_size > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(np.mean(s))


def noise_metric(cluster_points) -> float:
    """Sum of pairwise Euclidean distances among the members, divided by the member count."""
    x = _as_array(cluster_points)
    n = len(x)
    if n == 0:
        raise EmptyCluster("noise metric of an empty cluster")
    if n == 1:
        return 0.0
    iu = np.triu_indices(n, k=1)
    return float(np.sum(pairwise_distances(x)[iu]) / n)


def noise_per_cluster(points, clustering: Clustering) -> dict[int, float]:
    x = _as_array(points)
    return {c: noise_metric(x[clustering.labels == c]) for c in range(clustering.k)}


def assess(points, clustering: Clustering, tau: float = DEFAULT_TAU, with_silhouette: bool = True) -> ClusterQuality:
    sil = None
    if with_silhouette and clustering.k >= 2:
        sil = silhouette_score(points, clustering)
    return ClusterQuality(sil, noise_per_cluster(points, clustering), tau)


@dataclass(frozen=True)
class KDistanceCurve:
    sorted_distances: np.ndarray
    v: int


def k_distance_curve(points, v: int) -> KDistanceCurve:
    x = _as_array(points)
    n = len(x)
    if n <= v:
        raise TooFewPoints(f"need more than {v} points for the {v}-distance curve, got {n}")
    d = np.sort(pairwise_distances(x), axis=1)
    # column 0 is the point itself
    kth = d[:, v]
    return KDistanceCurve(np.sort(kth)[::-1].copy(), v)


def knee_index(values) -> int:
    """Index of maximum perpendicular distance to the chord from first to last value.

    Ties go to the smaller index.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if n < 3:
        return 0
    x = np.arange(n, dtype=float)
    x0, y0, x1, y1 = 0.0, y[0], x[-1], y[-1]
    num = np.abs((y1 - y0) * x - (x1 - x0) * y + x1 * y0 - y1 * x0)
    dist = num / np.hypot(y1 - y0, x1 - x0)
    return int(np.argmax(dist))


def elbow_eps(points, v: int) -> float:
    curve = k_distance_curve(points, v)
    eps = float(curve.sorted_distances[knee_index(curve.sorted_distances)])
    return eps if eps > 0 else EPS_FLOOR
