import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from habitminer.errors import NoAcceptedClusters
from habitminer.habits import (
    clock_string,
    extract_habits,
    format_report,
    parse_report,
    render_habit,
    dump_report,
    spread_string,
    validate_report,
)
from habitminer.model import NOISE, Clustering, ClusterQuality, HabitProfile, Method, PipelineResult
from habitminer.pipeline import profile_activity
from habitminer.synth import PlantedCluster, PlantedSpec, generate


def test_two_point_cluster():
    [h] = extract_habits([(8.2, 8.6), (8.8, 9.0)], Clustering(Method.KMEANS, None, [0, 0], 1))
    assert h.mean_start == pytest.approx(8.5)
    assert h.std_start == pytest.approx(0.3)
    assert h.mean_end == pytest.approx(8.8)
    assert h.std_end == pytest.approx(0.2)
    assert h.confidence == 1.0 and h.support == 2


def test_singleton_in_ten():
    pts = [(8.0, 9.0)] + [(15.0 + 0.1 * i, 16.0) for i in range(9)]
    c = Clustering(Method.DBSCAN, None, [0] + [NOISE] * 9, 1)
    [h] = extract_habits(pts, c)
    assert (h.std_start, h.std_end, h.confidence) == (0.0, 0.0, 0.1)
    [h] = extract_habits(pts, c, noise_in_denominator=False)
    assert h.confidence == 1.0


def test_breakfast_fractions():
    counts = [18, 24, 44, 13]
    labels = np.repeat(np.arange(4), counts)
    pts = np.column_stack([labels + 8.0, labels + 8.5])
    habits = extract_habits(pts, Clustering(Method.AGGLOMERATIVE, None, labels, 4))
    assert [h.confidence for h in habits] == [44 / 99, 24 / 99, 18 / 99, 13 / 99]
    assert sum(h.support for h in habits) == 99
    assert sum(h.confidence for h in habits) == pytest.approx(1.0, abs=1e-15)


def test_sort_ties_by_mean_start():
    pts = [(10, 11), (10, 11), (7, 8), (7, 8)]
    habits = extract_habits(pts, Clustering(Method.KMEANS, None, [0, 0, 1, 1], 2))
    assert [h.mean_start for h in habits] == [7, 10]


def test_no_clusters():
    with pytest.raises(NoAcceptedClusters):
        extract_habits([(1, 2)], Clustering(Method.DBSCAN, None, [NOISE], 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(0, 20))
def test_habit_invariants(seed, k, n_noise):
    rng = np.random.default_rng(seed)
    sizes = rng.integers(1, 10, k)
    starts = rng.uniform(0, 23.9, sizes.sum() + n_noise)
    pts = np.column_stack([starts, starts + rng.uniform(0, 5, len(starts))])
    labels = np.concatenate([np.repeat(np.arange(k), sizes), np.full(n_noise, NOISE)])
    c = Clustering(Method.DBSCAN, None, labels, k)
    habits = extract_habits(pts, c)
    total = sum(h.confidence for h in habits)
    if n_noise:
        assert total < 1
    else:
        assert total == pytest.approx(1.0)
    for h in habits:
        m = pts[labels == h.cluster_id]
        assert m[:, 0].min() <= h.mean_start <= m[:, 0].max()
        assert m[:, 1].min() <= h.mean_end <= m[:, 1].max()
        assert h.mean_start <= h.mean_end
        lo, hi = h.mean_start - h.std_start, h.mean_end + h.std_end
        assert lo <= m.max() and hi >= m.min()


@pytest.mark.parametrize("hours,text", [
    (8.5, "8:30am"), (0.0, "12:00am"), (12.0, "12:00pm"), (17.85, "5:51pm"),
    (24.5, "12:30am (+1 day)"), (23.9999, "12:00am (+1 day)"),
])
def test_clock_string(hours, text):
    assert clock_string(hours) == text


def test_spread_string():
    assert spread_string(8.5, 0.3) == "8:30am ± 18 minutes"


def _result(habits, labels, k, partial=False, method=Method.KMEANS):
    c = Clustering(method, None, labels, k)
    return PipelineResult("tv", c, ClusterQuality(None, {i: 0.0 for i in range(k)}, 4.0), habits, [], partial)


def test_empty_habit_report():
    data = format_report(_result([], [NOISE, NOISE], 0, partial=True, method=Method.DBSCAN))
    doc = parse_report(data)
    assert doc["habits"] == [] and doc["pipeline"]["partial"] is True


def test_report_round_trip_and_schema():
    ps, _ = generate(PlantedSpec([PlantedCluster(8, 9, 0.1, 15), PlantedCluster(20, 22, 0.1, 15)], scatter_count=5, seed=1))
    result = profile_activity(ps)
    data = format_report(result, {"file": "x.csv"})
    doc = parse_report(data)
    validate_report(doc)
    assert dump_report(doc) == data
    assert len(doc["labels"]) == len(ps)
    for h, d in zip(result.habits, doc["habits"]):
        assert d["mean_start_hours"] == float(f"{h.mean_start:.9g}")
        assert d["clock_render"] == render_habit(h)


def test_report_nine_significant_digits():
    h = HabitProfile(0, 1 / 3, 2 / 3, 0.1, 0.2, 1, 3, 1 / 3)
    doc = parse_report(format_report(_result([h], [0, NOISE, NOISE], 1, method=Method.DBSCAN)))
    assert doc["habits"][0]["mean_start_hours"] == 0.333333333
    assert doc["habits"][0]["confidence"] == 0.333333333
