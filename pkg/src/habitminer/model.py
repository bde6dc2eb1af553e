"""Domain types shared across the package.

Times are decimal hours on the wall clock (08:30 -> 8.5). An occurrence that
crosses midnight keeps a single tuple whose end is pushed past 24.
"""
from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import InvariantViolation, NonPositiveDuration, OverlongInterval

NOISE = -1
HOURS_PER_DAY = 24.0


class Method(str, enum.Enum):
    KMEANS = "KMEANS"
    AGGLOMERATIVE = "AGGLOMERATIVE"
    DBSCAN = "DBSCAN"


@dataclass(frozen=True)
class ActivityInterval:
    """One occurrence of an activity: a calendar date and a (start, end) hour pair."""

    date: dt.date
    start_hours: float
    end_hours: float
    activity: str = ""

    def __post_init__(self):
        check_interval(self.start_hours, self.end_hours)

    @property
    def duration_hours(self) -> float:
        return self.end_hours - self.start_hours

    def as_point(self) -> tuple[float, float]:
        return (self.start_hours, self.end_hours)


def check_interval(start_hours: float, end_hours: float) -> None:
    if not (np.isfinite(start_hours) and np.isfinite(end_hours)):
        raise InvariantViolation(f"non-finite interval ({start_hours}, {end_hours})")
    if not 0.0 <= start_hours < HOURS_PER_DAY:
        raise InvariantViolation(f"start_hours {start_hours} outside [0, 24)")
    if end_hours < start_hours:
        raise InvariantViolation(f"end_hours {end_hours} < start_hours {start_hours}")
    if end_hours - start_hours >= HOURS_PER_DAY:
        raise InvariantViolation(f"interval ({start_hours}, {end_hours}) spans a full day")


def clock_hours(t: dt.datetime) -> float:
    return t.hour + t.minute / 60.0 + (t.second + t.microsecond / 1e6) / 3600.0


def normalize_interval(start: dt.datetime, end: dt.datetime, activity: str = "") -> ActivityInterval:
    """Convert a pair of timestamps into an ActivityInterval.

    Raises NonPositiveDuration when ``end <= start`` and OverlongInterval when
    the occurrence lasts 24 hours or more.
    """
    if end <= start:
        raise NonPositiveDuration(f"end {end} is not after start {start}")
    if end - start >= dt.timedelta(days=1):
        raise OverlongInterval(f"interval {start} -> {end} lasts a day or more")
    s = clock_hours(start)
    e = clock_hours(end)
    if e < s or end.date() != start.date():
        e += HOURS_PER_DAY
    return ActivityInterval(start.date(), s, e, activity)


@dataclass(frozen=True)
class PointSet:
    """Ordered (start_hours, end_hours) coordinates for a single activity."""

    points: np.ndarray
    activity: str = ""

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_intervals(cls, intervals: Sequence[ActivityInterval], activity: Optional[str] = None) -> "PointSet":
        if activity is None:
            activity = intervals[0].activity if intervals else ""
        pts = np.array([iv.as_point() for iv in intervals], dtype=float).reshape(-1, 2)
        return cls(pts, activity)


@dataclass(frozen=True)
class Clustering:
    """Per-point labels produced by one clustering method.

    Labels are cluster ids ``0..k-1`` numbered by first appearance in point
    order; DBSCAN may also emit ``NOISE``.
    """

    method: Method
    params: Any
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        ids = set(np.unique(labels[labels != NOISE]).tolist())
        if ids != set(range(self.k)):
            raise InvariantViolation(f"cluster ids {sorted(ids)} do not cover 0..{self.k - 1}")
        if self.method is not Method.DBSCAN and np.any(labels == NOISE):
            raise InvariantViolation("NOISE labels are only produced by DBSCAN")

    @property
    def noise_count(self) -> int:
        return int(np.sum(self.labels == NOISE))

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster_id)


def canonical_labels(labels: Sequence[int]) -> np.ndarray:
    """Renumber clusters by order of first appearance; NOISE is left alone."""
    labels = np.asarray(labels, dtype=np.int64)
    out = np.full(labels.shape, NOISE, dtype=np.int64)
    mapping: dict[int, int] = {}
    for i, lab in enumerate(labels.tolist()):
        if lab == NOISE:
            continue
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out


@dataclass(frozen=True)
class ClusterQuality:
    silhouette: Optional[float]
    noise_per_cluster: dict[int, float]
    threshold: float

    @property
    def worst(self) -> tuple[int, float]:
        if not self.noise_per_cluster:
            return (NOISE, 0.0)
        cid = max(self.noise_per_cluster, key=lambda c: (self.noise_per_cluster[c], -c))
        return cid, self.noise_per_cluster[cid]


@dataclass(frozen=True)
class HabitProfile:
    cluster_id: int
    mean_start: float
    mean_end: float
    std_start: float
    std_end: float
    support: int
    total_n: int
    confidence: float


@dataclass(frozen=True)
class TraceRecord:
    """One decision taken by the pipeline."""

    stage: str  # "sweep", "validate" or "dbscan"
    method: Method
    k_or_eps: float
    silhouette: Optional[float]
    worst_pr: Optional[float]
    verdict: str  # "accept" or "reject"
    reason: str = ""


@dataclass(frozen=True)
class PipelineResult:
    activity: str
    clustering: Clustering
    quality: ClusterQuality
    habits: list[HabitProfile]
    trace: list[TraceRecord]
    partial: bool = False
    params: dict[str, Any] = field(default_factory=dict)
