"""Turn an accepted clustering into habit profiles and serialize reports."""
from __future__ import annotations

import json
import math
from typing import Any, Optional

import jsonschema
import numpy as np

from .clustering import _as_array
from .errors import NoAcceptedClusters
from .model import Clustering, HabitProfile, PipelineResult, TraceRecord

SIG_DIGITS = 9
REPORT_VERSION = 1


def extract_habits(points, clustering: Clustering, noise_in_denominator: bool = True) -> list[HabitProfile]:
    """Mean and population std of start/end per cluster, with confidence q/n.

    n counts every point of the activity, NOISE included, unless
    ``noise_in_denominator`` is False.
    """
    x = _as_array(points)
    if clustering.k < 1:
        raise NoAcceptedClusters("clustering has no non-noise clusters")
    total = len(x) if noise_in_denominator else len(x) - clustering.noise_count
    habits = []
    for c in range(clustering.k):
        m = x[clustering.labels == c]
        # rounding can push the mean of identical values one ulp outside the data
        mean = np.clip(m.mean(axis=0), m.min(axis=0), m.max(axis=0))
        std = m.std(axis=0)
        habits.append(HabitProfile(
            cluster_id=c,
            mean_start=float(mean[0]),
            mean_end=float(mean[1]),
            std_start=float(std[0]),
            std_end=float(std[1]),
            support=len(m),
            total_n=total,
            confidence=len(m) / total,
        ))
    habits.sort(key=lambda h: (-h.confidence, h.mean_start, h.cluster_id))
    return habits


# --- rendering -------------------------------------------------------------

def clock_string(hours: float) -> str:
    """8.5 -> '8:30am'; values past midnight get a '(+1 day)' suffix."""
    minutes = int(math.floor(hours * 60 + 0.5))
    days, minutes = divmod(minutes, 24 * 60)
    h, m = divmod(minutes, 60)
    suffix = "am" if h < 12 else "pm"
    text = f"{(h % 12) or 12}:{m:02d}{suffix}"
    if days > 0:
        text += f" (+{days} day{'s' if days > 1 else ''})"
    return text


def spread_string(mean: float, std: float) -> str:
    return f"{clock_string(mean)} ± {int(math.floor(std * 60 + 0.5))} minutes"


def render_habit(h: HabitProfile) -> str:
    return f"{spread_string(h.mean_start, h.std_start)} - {spread_string(h.mean_end, h.std_end)}"


def _real(x: Optional[float]) -> Optional[float]:
    if x is None:
        return None
    return float(f"{float(x):.{SIG_DIGITS}g}")


def _trace_dict(t: TraceRecord) -> dict[str, Any]:
    return {
        "stage": t.stage,
        "method": t.method.value,
        "k_or_eps": _real(t.k_or_eps) if t.method.value == "DBSCAN" else int(t.k_or_eps),
        "silhouette": _real(t.silhouette),
        "worst_Pr": _real(t.worst_pr),
        "verdict": t.verdict,
        "reason": t.reason,
    }


def _params_dict(params) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if params is None:
        return out
    for key, value in vars(params).items():
        if hasattr(value, "value"):
            value = value.value
        elif isinstance(value, float):
            value = _real(value)
        out[key] = value
    return out


def report_dict(result: PipelineResult, source: Optional[dict] = None) -> dict[str, Any]:
    c = result.clustering
    return {
        "version": REPORT_VERSION,
        "activity": result.activity,
        "source": source or {},
        "pipeline": {
            "chosen_method": c.method.value,
            "params": _params_dict(c.params),
            "silhouette": _real(result.quality.silhouette),
            "tau": _real(result.quality.threshold),
            "partial": bool(result.partial),
            "config": {k: _real(v) if isinstance(v, float) else v for k, v in result.params.items()},
        },
        "habits": [
            {
                "cluster_id": h.cluster_id,
                "mean_start_hours": _real(h.mean_start),
                "std_start_hours": _real(h.std_start),
                "mean_end_hours": _real(h.mean_end),
                "std_end_hours": _real(h.std_end),
                "support": h.support,
                "total_n": h.total_n,
                "confidence": _real(h.confidence),
                "clock_render": render_habit(h),
            }
            for h in result.habits
        ],
        "noise_per_cluster": {str(k): _real(v) for k, v in sorted(result.quality.noise_per_cluster.items())},
        "labels": [int(v) for v in c.labels],
        "trace": [_trace_dict(t) for t in result.trace],
    }


def dump_report(doc: dict[str, Any]) -> bytes:
    """Serialize a report document; reals are rounded to 9 significant digits."""
    return (json.dumps(_round_reals(doc), indent=2, ensure_ascii=False, sort_keys=False) + "\n").encode("utf-8")


def _round_reals(obj):
    if isinstance(obj, float):
        return _real(obj)
    if isinstance(obj, dict):
        return {k: _round_reals(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_reals(v) for v in obj]
    return obj


def format_report(result: PipelineResult, source: Optional[dict] = None) -> bytes:
    return dump_report(report_dict(result, source))


def parse_report(data: bytes) -> dict[str, Any]:
    return json.loads(data.decode("utf-8"))


def error_report(activity: str, error: Exception, n_points: int, source: Optional[dict] = None) -> bytes:
    """Report for an activity the pipeline could not profile."""
    return dump_report({
        "version": REPORT_VERSION,
        "activity": activity,
        "source": source or {},
        "pipeline": {"chosen_method": None, "params": {}, "silhouette": None, "tau": None, "partial": True},
        "error": {"type": type(error).__name__, "message": str(error), "n_points": n_points},
        "habits": [],
        "noise_per_cluster": {},
        "labels": [-1] * n_points,
        "trace": [],
    })


REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["activity", "source", "pipeline", "habits", "trace", "labels"],
    "properties": {
        "activity": {"type": "string"},
        "source": {"type": "object"},
        "pipeline": {
            "type": "object",
            "required": ["chosen_method", "params", "silhouette", "tau", "partial"],
            "properties": {
                "chosen_method": {"enum": ["KMEANS", "AGGLOMERATIVE", "DBSCAN", None]},
                "silhouette": {"type": ["number", "null"], "minimum": -1, "maximum": 1},
                "tau": {"type": ["number", "null"]},
                "partial": {"type": "boolean"},
            },
        },
        "habits": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "cluster_id", "mean_start_hours", "std_start_hours", "mean_end_hours",
                    "std_end_hours", "support", "total_n", "confidence", "clock_render",
                ],
                "properties": {
                    "cluster_id": {"type": "integer", "minimum": 0},
                    "std_start_hours": {"type": "number", "minimum": 0},
                    "std_end_hours": {"type": "number", "minimum": 0},
                    "support": {"type": "integer", "minimum": 1},
                    "total_n": {"type": "integer", "minimum": 1},
                    "confidence": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "clock_render": {"type": "string"},
                },
            },
        },
        "labels": {"type": "array", "items": {"type": "integer", "minimum": -1}},
        "trace": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["stage", "method", "k_or_eps", "silhouette", "worst_Pr", "verdict"],
                "properties": {"verdict": {"enum": ["accept", "reject"]}},
            },
        },
    },
}


def validate_report(doc: dict[str, Any]) -> None:
    jsonschema.validate(doc, REPORT_SCHEMA)
