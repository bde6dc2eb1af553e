"""Synthetic activity datasets with planted habit clusters."""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidSpec
from .model import NOISE, ActivityInterval, PointSet

MAX_RESAMPLES = 100
SCATTER_MAX_DURATION = 12.0
START_DATE = dt.date(2020, 1, 1)


@dataclass(frozen=True)
class PlantedCluster:
    center_start: float
    center_end: float
    std: float
    count: int


@dataclass(frozen=True)
class PlantedSpec:
    clusters: Sequence[PlantedCluster]
    scatter_count: int = 0
    seed: int = 0
    activity: str = "synthetic"

    def __post_init__(self):
        clusters = tuple(c if isinstance(c, PlantedCluster) else PlantedCluster(**c) for c in self.clusters)
        object.__setattr__(self, "clusters", clusters)
        for c in clusters:
            if c.count < 1:
                raise InvalidSpec(f"cluster count must be >= 1, got {c.count}")
            if c.std < 0:
                raise InvalidSpec(f"std must be >= 0, got {c.std}")
            if c.center_end < c.center_start:
                raise InvalidSpec("center_end must be >= center_start")
            if not 0 <= c.center_start < 24 or c.center_end - c.center_start >= 24:
                raise InvalidSpec(f"center ({c.center_start}, {c.center_end}) outside valid tuple space")
        if self.scatter_count < 0:
            raise InvalidSpec("scatter_count must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> "PlantedSpec":
        try:
            return cls(
                clusters=[PlantedCluster(**c) for c in data.get("clusters", [])],
                scatter_count=int(data.get("scatter_count", 0)),
                seed=int(data.get("seed", 0)),
                activity=str(data.get("activity", "synthetic")),
            )
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "PlantedSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"spec is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidSpec("spec must be a JSON object")
        return cls.from_dict(data)


def _valid(s: float, e: float) -> bool:
    return 0 <= s < 24 and s <= e and e - s < 24


def _draw(rng: np.random.Generator, c: PlantedCluster) -> tuple[float, float]:
    for _ in range(MAX_RESAMPLES):
        s, e = rng.normal((c.center_start, c.center_end), c.std)
        if _valid(s, e):
            return float(s), float(e)
    s = float(np.clip(s, 0.0, np.nextafter(24.0, 0.0)))
    e = float(np.clip(e, s, s + np.nextafter(24.0, 0.0)))
    return s, e


def generate(spec: PlantedSpec) -> tuple[PointSet, np.ndarray]:
    """Draw points for every planted cluster, then uniform scatter.

    Returns the point set and the ground-truth labels (cluster index, or
    NOISE for scatter points). Points appear cluster by cluster, scatter last.
    """
    rng = np.random.default_rng(spec.seed)
    pts, truth = [], []
    for idx, c in enumerate(spec.clusters):
        for _ in range(c.count):
            pts.append(_draw(rng, c))
            truth.append(idx)
    for _ in range(spec.scatter_count):
        s = rng.uniform(0.0, 24.0)
        e = s + rng.uniform(0.0, SCATTER_MAX_DURATION)
        pts.append((float(s), float(e)))
        truth.append(NOISE)
    return PointSet(np.array(pts, dtype=float).reshape(-1, 2), spec.activity), np.array(truth, dtype=np.int64)


def to_intervals(points: PointSet, start_date: dt.date = START_DATE) -> list[ActivityInterval]:
    """Attach one consecutive calendar date per point."""
    return [
        ActivityInterval(start_date + dt.timedelta(days=i), float(s), float(e), points.activity)
        for i, (s, e) in enumerate(points.points)
    ]
