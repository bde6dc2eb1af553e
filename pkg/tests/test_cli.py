import json
import re

import pytest
from conftest import television_spec

from habitminer.cli import main, report_filename
from habitminer.ingest import read_intervals_csv, write_intervals_csv
from habitminer.synth import generate, to_intervals


def spec_file(tmp_path, spec_dict, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec_dict))
    return path


FOUR_BLOBS = {
    "activity": "tv",
    "seed": 3,
    "clusters": [
        {"center_start": s, "center_end": e, "std": 0.1, "count": 10}
        for s, e in [(2, 3), (8, 10), (14, 15), (19, 22)]
    ],
}


def run_profile(tmp_path, csv_path, out="reports", *extra):
    return main(["profile", "--input", str(csv_path), "--output", str(tmp_path / out), *extra])


# --- ingest ----------------------------------------------------------------

def test_ingest_refit(tmp_path, refit_burst):
    src = tmp_path / "house.csv"
    src.write_bytes(refit_burst)
    out = tmp_path / "iv.csv"
    assert main(["ingest", "--format", "refit", "--input", str(src), "--appliance", "Appliance5", "--output", str(out)]) == 0
    assert len(read_intervals_csv(out.read_bytes())) == 1


def test_ingest_casas(tmp_path, casas_sleep):
    src = tmp_path / "casas.txt"
    src.write_bytes(casas_sleep)
    out = tmp_path / "iv.csv"
    assert main(["ingest", "--format", "casas", "--input", str(src), "--activity", "Sleep", "--output", str(out)]) == 0
    [iv] = read_intervals_csv(out.read_bytes())
    assert iv.activity == "Sleep"


def test_ingest_casas_missing_activity(tmp_path, casas_sleep, capsys):
    src = tmp_path / "casas.txt"
    src.write_bytes(casas_sleep)
    code = main(["ingest", "--format", "casas", "--input", str(src), "--activity", "Teleport", "--output", str(tmp_path / "o.csv")])
    assert code == 3
    assert "Teleport" in capsys.readouterr().err


def test_ingest_malformed(tmp_path, refit_burst):
    src = tmp_path / "house.csv"
    src.write_bytes(refit_burst + b"garbage,row\n")
    args = ["ingest", "--format", "refit", "--input", str(src), "--appliance", "Appliance5", "--output", str(tmp_path / "o.csv")]
    assert main(args) == 2
    assert main(args + ["--skip-errors"]) == 0


def test_ingest_unknown_column_and_missing_file(tmp_path, refit_burst):
    src = tmp_path / "house.csv"
    src.write_bytes(refit_burst)
    assert main(["ingest", "--format", "refit", "--input", str(src), "--appliance", "Nope", "--output", str(tmp_path / "o.csv")]) == 2
    assert main(["ingest", "--format", "intervals", "--input", str(tmp_path / "missing.csv"), "--output", str(tmp_path / "o.csv")]) == 2


# --- synth -----------------------------------------------------------------

def test_synth_writes_csv_and_labels(tmp_path):
    out = tmp_path / "four.csv"
    assert main(["synth", "--spec", str(spec_file(tmp_path, FOUR_BLOBS)), "--output", str(out)]) == 0
    ivs = read_intervals_csv(out.read_bytes())
    assert len(ivs) == 40
    labels = (tmp_path / "four.labels.csv").read_text().splitlines()
    assert labels[0] == "index,label" and len(labels) == 41


def test_synth_zero_std(tmp_path):
    spec = {"clusters": [{"center_start": 8, "center_end": 9, "std": 0, "count": 5}]}
    out = tmp_path / "z.csv"
    assert main(["synth", "--spec", str(spec_file(tmp_path, spec)), "--output", str(out)]) == 0
    assert {(iv.start_hours, iv.end_hours) for iv in read_intervals_csv(out.read_bytes())} == {(8.0, 9.0)}


def test_synth_deterministic(tmp_path):
    path = spec_file(tmp_path, FOUR_BLOBS)
    main(["synth", "--spec", str(path), "--output", str(tmp_path / "a.csv")])
    main(["synth", "--spec", str(path), "--output", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_synth_invalid(tmp_path):
    bad = {"clusters": [{"center_start": 9, "center_end": 8, "std": 0.1, "count": 3}]}
    assert main(["synth", "--spec", str(spec_file(tmp_path, bad)), "--output", str(tmp_path / "x.csv")]) == 2
    (tmp_path / "broken.json").write_text("{")
    assert main(["synth", "--spec", str(tmp_path / "broken.json"), "--output", str(tmp_path / "x.csv")]) == 2


# --- profile ---------------------------------------------------------------

@pytest.fixture
def four_blob_csv(tmp_path):
    out = tmp_path / "four.csv"
    main(["synth", "--spec", str(spec_file(tmp_path, FOUR_BLOBS)), "--output", str(out)])
    return out


@pytest.fixture
def tv_csv(tmp_path):
    ps, _ = generate(television_spec(seed=0))
    out = tmp_path / "tv.csv"
    out.write_bytes(write_intervals_csv(to_intervals(ps)))
    return out


def test_profile_four_blobs(tmp_path, four_blob_csv):
    assert run_profile(tmp_path, four_blob_csv) == 0
    doc = json.loads((tmp_path / "reports" / "tv.json").read_text())
    assert len(doc["habits"]) == 4
    assert doc["pipeline"]["partial"] is False


def test_profile_fallback(tmp_path, tv_csv):
    assert run_profile(tmp_path, tv_csv) == 0
    doc = json.loads((tmp_path / "reports" / "television.json").read_text())
    assert doc["pipeline"]["chosen_method"] == "DBSCAN"
    assert any(t["stage"] == "validate" and t["verdict"] == "reject" for t in doc["trace"])
    assert doc["trace"][-1]["stage"] == "dbscan" and doc["trace"][-1]["verdict"] == "accept"


def test_profile_too_few_points(tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("activity,date,start_hours,end_hours\nx,2020-01-01,8.0,9.0\nx,2020-01-02,8.5,9.0\n")
    assert run_profile(tmp_path, path) == 4
    doc = json.loads((tmp_path / "reports" / "x.json").read_text())
    assert doc["error"]["type"] == "TooFewPoints"
    assert doc["habits"] == []


def test_profile_activities_independent(tmp_path, four_blob_csv):
    text = four_blob_csv.read_text() + "lonely,2020-01-01,1.0000,2.0000\n"
    path = tmp_path / "mixed.csv"
    path.write_text(text)
    assert run_profile(tmp_path, path) == 4
    assert len(json.loads((tmp_path / "reports" / "tv.json").read_text())["habits"]) == 4
    assert "error" in json.loads((tmp_path / "reports" / "lonely.json").read_text())
    assert run_profile(tmp_path, path, "only", "--activity", "tv") == 0
    assert [p.name for p in (tmp_path / "only").iterdir()] == ["tv.json"]


def test_profile_unreadable(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nonsense\n")
    assert run_profile(tmp_path, path) == 2
    assert run_profile(tmp_path, tmp_path / "missing.csv") == 2


def test_profile_seed_from_environment(tmp_path, four_blob_csv, monkeypatch):
    monkeypatch.setenv("HABITMINER_SEED", "99")
    assert run_profile(tmp_path, four_blob_csv, "env") == 0
    doc = json.loads((tmp_path / "env" / "tv.json").read_text())
    assert doc["source"]["parameters"]["seed"] == 99


def test_profile_flags_recorded(tmp_path, four_blob_csv):
    assert run_profile(tmp_path, four_blob_csv, "r", "--k-max", "5", "--tau", "6", "--noise-in-denominator", "false") == 0
    params = json.loads((tmp_path / "r" / "tv.json").read_text())["source"]["parameters"]
    assert (params["k_max"], params["tau"], params["noise_in_denominator"]) == (5, 6.0, False)


def test_report_filename():
    assert report_filename("Watch TV/evening") == "Watch_TV_evening.json"


# --- plot ------------------------------------------------------------------

def test_plot_four_blobs(tmp_path, four_blob_csv):
    run_profile(tmp_path, four_blob_csv)
    svg = tmp_path / "p.svg"
    assert main(["plot", "--input", str(four_blob_csv), "--report", str(tmp_path / "reports" / "tv.json"), "--output", str(svg)]) == 0
    text = svg.read_text()
    groups = re.findall(r'<g class="points (cluster-\d+|noise)"', text)
    assert sorted(groups) == ["cluster-0", "cluster-1", "cluster-2", "cluster-3"]
    assert text.count('class="cross"') == 4
    assert text.count("<circle") == 40


def test_plot_all_noise(tmp_path):
    path = tmp_path / "two.csv"
    path.write_text("activity,date,start_hours,end_hours\nx,2020-01-01,8.0,9.0\nx,2020-01-02,8.5,9.0\n")
    run_profile(tmp_path, path)
    svg = tmp_path / "p.svg"
    assert main(["plot", "--input", str(path), "--report", str(tmp_path / "reports" / "x.json"), "--output", str(svg)]) == 0
    text = svg.read_text()
    assert re.findall(r'<g class="points ([\w-]+)"', text) == ["noise"]
    assert "#9e9e9e" in text and 'class="cross"' not in text


def test_plot_empty_or_mismatched(tmp_path, four_blob_csv):
    run_profile(tmp_path, four_blob_csv)
    report = str(tmp_path / "reports" / "tv.json")
    empty = tmp_path / "empty.csv"
    empty.write_text("activity,date,start_hours,end_hours\n")
    assert main(["plot", "--input", str(empty), "--report", report, "--output", str(tmp_path / "e.svg")]) == 2
    short = tmp_path / "short.csv"
    short.write_text("\n".join(four_blob_csv.read_text().splitlines()[:-1]) + "\n")
    assert main(["plot", "--input", str(short), "--report", report, "--output", str(tmp_path / "s.svg")]) == 2


def test_plot_deterministic(tmp_path, tv_csv):
    run_profile(tmp_path, tv_csv)
    report = str(tmp_path / "reports" / "television.json")
    for name in ("a.svg", "b.svg"):
        main(["plot", "--input", str(tv_csv), "--report", report, "--output", str(tmp_path / name)])
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
