"""End-to-end habit extraction for one activity.

Sweep k-means and agglomerative clustering over k = 2..k_max and keep the
arrangement with the best silhouette. If any of its clusters is too sparse
(noise metric above tau) fall back to DBSCAN, starting from the elbow eps and
shrinking it geometrically until every cluster passes.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .clustering import (
    AgglomerativeParams,
    DbscanParams,
    KMeansParams,
    Linkage,
    _as_array,
    agglomerative,
    dbscan,
    kmeans,
)
from .errors import NoClusterFound, TooFewPoints
from .habits import extract_habits
from .model import Clustering, ClusterQuality, Method, PipelineResult, PointSet, TraceRecord
from .quality import DEFAULT_TAU, elbow_eps, noise_per_cluster, silhouette_score

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    k_max: int = 10
    tau: float = DEFAULT_TAU
    min_points_v: int = 4
    eps_decay: float = 0.9
    eps_floor: float = 0.05
    max_fallback_rounds: int = 20
    seed: int = 0
    kmeans_restarts: int = 10
    linkage: Linkage = Linkage.WARD
    noise_in_denominator: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.k_max < 2:
            raise ValueError("k_max must be >= 2")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.min_points_v < 1:
            raise ValueError("min_points_v must be >= 1")
        if not 0 < self.eps_decay < 1:
            raise ValueError("eps_decay must lie in (0, 1)")
        if not self.eps_floor > 0:
            raise ValueError("eps_floor must be > 0")
        if self.max_fallback_rounds < 1:
            raise ValueError("max_fallback_rounds must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "linkage", Linkage(self.linkage))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["linkage"] = self.linkage.value
        del d["workers"]  # does not affect results
        return d


@dataclass(frozen=True)
class NoiseVerdict:
    passed: bool
    worst_cluster: int
    worst_pr: float


def validate_noise(points, clustering: Clustering, tau: float) -> NoiseVerdict:
    """PASS iff every non-noise cluster has noise metric <= tau (inclusive)."""
    scores = noise_per_cluster(points, clustering)
    if not scores:
        return NoiseVerdict(True, -1, 0.0)
    worst = max(scores, key=lambda c: (scores[c], -c))
    return NoiseVerdict(scores[worst] <= tau, worst, scores[worst])


def _run_candidate(x: np.ndarray, method: Method, k: int, config: PipelineConfig):
    if method is Method.KMEANS:
        c = kmeans(x, KMeansParams(k, restarts=config.kmeans_restarts, seed=config.seed))
    else:
        c = agglomerative(x, AgglomerativeParams(k, config.linkage))
    return c, silhouette_score(x, c)


def sweep_partitional(points, config: PipelineConfig = PipelineConfig(), trace: Optional[list] = None):
    """Best (clustering, silhouette) over methods x k = 2..min(k_max, n-1).

    Ties go to the smaller k, then k-means before agglomerative.
    """
    x = _as_array(points)
    n = len(x)
    if n < 3:
        raise TooFewPoints(f"the partitional sweep needs >= 3 points, got {n}")
    grid = [(m, k) for k in range(2, min(config.k_max, n - 1) + 1) for m in (Method.KMEANS, Method.AGGLOMERATIVE)]
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(lambda mk: _run_candidate(x, mk[0], mk[1], config), grid))
    else:
        results = [_run_candidate(x, m, k, config) for m, k in grid]
    best = 0
    for i, (_, sil) in enumerate(results):
        if sil > results[best][1]:
            best = i
    if trace is not None:
        for i, ((m, k), (c, sil)) in enumerate(zip(grid, results)):
            worst = validate_noise(x, c, config.tau).worst_pr
            if i == best:
                trace.append(TraceRecord("sweep", m, k, sil, worst, "accept", "best silhouette"))
            else:
                trace.append(TraceRecord("sweep", m, k, sil, worst, "reject", "lower silhouette"))
    return results[best]


@dataclass(frozen=True)
class FallbackOutcome:
    clustering: Clustering
    partial: bool
    eps: float


def dbscan_fallback(points, config: PipelineConfig = PipelineConfig(), trace: Optional[list] = None) -> FallbackOutcome:
    """DBSCAN from the elbow eps, shrinking eps by ``eps_decay`` until every cluster passes.

    When no round is accepted the clustering with the lowest worst noise
    metric is returned with ``partial=True``. Raises NoClusterFound if every
    round labelled all points NOISE.
    """
    x = _as_array(points)
    eps = elbow_eps(x, config.min_points_v)
    best: Optional[tuple[float, Clustering, float]] = None
    for round_no in range(config.max_fallback_rounds):
        if round_no > 0 and eps < config.eps_floor:
            log.info("eps %.4g below floor %.4g, stopping", eps, config.eps_floor)
            break
        c = dbscan(x, DbscanParams(eps, config.min_points_v))
        if c.k == 0:
            if trace is not None:
                trace.append(TraceRecord("dbscan", Method.DBSCAN, eps, None, None, "reject", "all points noise"))
            break
        verdict = validate_noise(x, c, config.tau)
        if verdict.passed:
            if trace is not None:
                trace.append(TraceRecord("dbscan", Method.DBSCAN, eps, None, verdict.worst_pr, "accept", "noise metric within tau"))
            return FallbackOutcome(c, False, eps)
        if trace is not None:
            trace.append(TraceRecord("dbscan", Method.DBSCAN, eps, None, verdict.worst_pr, "reject", "noise metric above tau"))
        if best is None or verdict.worst_pr < best[0]:
            best = (verdict.worst_pr, c, eps)
        eps *= config.eps_decay
    if best is None:
        raise NoClusterFound("DBSCAN labelled every point as noise")
    return FallbackOutcome(best[1], True, best[2])


def profile_activity(points, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    activity = points.activity if isinstance(points, PointSet) else ""
    x = _as_array(points)
    trace: list[TraceRecord] = []
    clustering, sil = sweep_partitional(x, config, trace)
    verdict = validate_noise(x, clustering, config.tau)
    trace.append(TraceRecord(
        "validate", clustering.method, clustering.k, sil, verdict.worst_pr,
        "accept" if verdict.passed else "reject",
        "noise metric within tau" if verdict.passed else f"cluster {verdict.worst_cluster} noise metric above tau",
    ))
    partial = False
    if not verdict.passed:
        outcome = dbscan_fallback(x, config, trace)
        clustering, sil, partial = outcome.clustering, None, outcome.partial
    quality = ClusterQuality(sil, noise_per_cluster(x, clustering), config.tau)
    habits = extract_habits(x, clustering, config.noise_in_denominator)
    return PipelineResult(activity, clustering, quality, habits, trace, partial, config.as_dict())
