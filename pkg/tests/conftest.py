import datetime as dt

import pytest

from habitminer.synth import PlantedCluster, PlantedSpec

REFIT_HEADER = "Time,Unix,Aggregate," + ",".join(f"Appliance{i}" for i in range(1, 10))


def refit_rows(start: dt.datetime, spacing_s: int, watts, column: int = 5) -> str:
    """REFIT-layout CSV with ``watts`` in ApplianceN and zeros elsewhere."""
    lines = [REFIT_HEADER]
    epoch = dt.datetime(1970, 1, 1)
    for i, w in enumerate(watts):
        t = start + dt.timedelta(seconds=i * spacing_s)
        apps = ["0"] * 9
        apps[column - 1] = str(w)
        stamp = t.strftime("%m/%d/%Y %I:%M:%S %p").lstrip("0")
        lines.append(f"{stamp},{int((t - epoch).total_seconds())},{270 + w}," + ",".join(apps))
    return "\n".join(lines) + "\n"


CASAS_SLEEP = """\
2011-06-15 00:06:32.834414 M021 Bedroom Bed ON Control4-Motion Sleep
2011-06-15 00:06:33.988964 M021 Bedroom Bed OFF Control4-Motion Sleep
2011-06-15 00:15:01.957718 LS013 Ignore Ignore 6 Control4-LightSensor Sleep
2011-06-15 00:25:01.892474 LS013 Ignore Ignore 7 Control4-LightSensor Sleep
"""


@pytest.fixture
def refit_burst() -> bytes:
    return refit_rows(dt.datetime(2013, 9, 26, 9, 56, 0), 60, [2, 11, 11, 11, 2]).encode()


@pytest.fixture
def casas_sleep() -> bytes:
    return CASAS_SLEEP.encode()


BREAKFAST_COUNTS = (18, 24, 44, 13)
# one-hour habits: short durations would make the end >= start resampling bias the means
BREAKFAST_CENTERS = ((8.5, 9.5), (10.0, 11.0), (11.5, 12.5), (13.0, 14.0))


def breakfast_spec(seed=1, std=0.25, counts=BREAKFAST_COUNTS) -> PlantedSpec:
    return PlantedSpec(
        [PlantedCluster(s, e, std, c) for (s, e), c in zip(BREAKFAST_CENTERS, counts)],
        seed=seed,
        activity="breakfast",
    )


def television_spec(seed=0) -> PlantedSpec:
    return PlantedSpec(
        [PlantedCluster(8.0, 9.0, 0.1, 20), PlantedCluster(19.0, 21.0, 0.1, 20)],
        scatter_count=60,
        seed=seed,
        activity="television",
    )


# one "[criterion N] PASS/FAIL: detail" line per acceptance criterion
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
