"""Parsers turning raw logs into ActivityInterval lists.

Three inputs are understood: REFIT-style per-appliance power CSVs, CASAS-style
labelled sensor event logs, and the package's own canonical intervals CSV.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import logging
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Optional, Union

import numpy as np

from .errors import (
    EmptyResult,
    HabitMinerError,
    InvariantViolation,
    MalformedRow,
    UnknownColumn,
)
from .model import ActivityInterval, check_interval, normalize_interval

log = logging.getLogger(__name__)

Stream = Union[BinaryIO, io.TextIOBase, bytes, str]

INTERVALS_HEADER = ["activity", "date", "start_hours", "end_hours"]

_TIME_FORMATS = (
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M:%S.%f",
    "%Y-%m-%dT%H:%M:%S",
    "%m/%d/%Y %I:%M:%S %p",
    "%m/%d/%Y %H:%M:%S",
    "%d/%m/%Y %H:%M",
)


@dataclass(frozen=True)
class IngestConfig:
    power_threshold_watts: float = 5.0
    merge_gap_seconds: int = 60
    min_duration_seconds: int = 120

    def __post_init__(self):
        if not self.power_threshold_watts > 0:
            raise ValueError("power_threshold_watts must be > 0")
        if self.merge_gap_seconds < 0 or self.min_duration_seconds < 0:
            raise ValueError("merge gap and minimum duration must be >= 0")


def _text(stream: Stream) -> io.TextIOBase:
    if isinstance(stream, bytes):
        return io.StringIO(stream.decode("utf-8-sig"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")


def parse_timestamp(text: str) -> dt.datetime:
    text = " ".join(text.split())
    for fmt in _TIME_FORMATS:
        try:
            return dt.datetime.strptime(text, fmt)
        except ValueError:
            continue
    return dt.datetime.fromisoformat(text)


# --- REFIT power readings --------------------------------------------------

def on_runs(times: Iterable[dt.datetime], watts: Iterable[float], config: IngestConfig):
    """Collapse (timestamp, watts) samples into merged ON spans.

    A sample is ON when strictly above the threshold. A run spans its first
    to last ON sample. Runs whose gap is at most ``merge_gap_seconds`` are
    merged; spans shorter than ``min_duration_seconds`` are dropped.
    """
    runs: list[list[dt.datetime]] = []
    current: Optional[list[dt.datetime]] = None
    for t, w in zip(times, watts):
        if w > config.power_threshold_watts:
            if current is None:
                current = [t, t]
                runs.append(current)
            else:
                current[1] = t
        else:
            current = None
    merged: list[list[dt.datetime]] = []
    gap = dt.timedelta(seconds=config.merge_gap_seconds)
    for start, end in runs:
        if merged and start - merged[-1][1] <= gap:
            merged[-1][1] = end
        else:
            merged.append([start, end])
    min_dur = dt.timedelta(seconds=config.min_duration_seconds)
    return [(s, e) for s, e in merged if e - s >= min_dur and e > s]


def parse_power_csv(stream: Stream, appliance_column: str, config: IngestConfig = IngestConfig(),
                    skip_errors: bool = False, activity: Optional[str] = None) -> list[ActivityInterval]:
    reader = csv.reader(_text(stream))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MalformedRow(1, "missing header") from None
    if appliance_column not in header:
        raise UnknownColumn(f"column {appliance_column!r} not in header {header}")
    col = header.index(appliance_column)
    if "Time" in header:
        tcol, from_unix = header.index("Time"), False
    elif "Unix" in header:
        tcol, from_unix = header.index("Unix"), True
    else:
        raise UnknownColumn("no 'Time' or 'Unix' timestamp column")

    samples = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        try:
            if len(row) != len(header):
                raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
            try:
                w = float(row[col])
            except ValueError:
                raise MalformedRow(line_no, f"non-numeric watts {row[col]!r}") from None
            if not np.isfinite(w) or w < 0:
                raise MalformedRow(line_no, f"invalid watts {row[col]!r}")
            try:
                if from_unix:
                    t = dt.datetime.fromtimestamp(float(row[tcol]), dt.timezone.utc).replace(tzinfo=None)
                else:
                    t = parse_timestamp(row[tcol])
            except (ValueError, OverflowError):
                raise MalformedRow(line_no, f"unparseable timestamp {row[tcol]!r}") from None
        except MalformedRow as exc:
            if not skip_errors:
                raise
            log.warning("skipping %s", exc)
            continue
        samples.append((t, w))

    samples.sort(key=lambda s: s[0])
    name = activity if activity is not None else appliance_column
    out = []
    for s, e in on_runs((t for t, _ in samples), (w for _, w in samples), config):
        try:
            out.append(normalize_interval(s, e, name))
        except HabitMinerError as exc:
            log.warning("dropping ON span %s -> %s: %s", s, e, exc)
    return sorted(out, key=lambda iv: (iv.date, iv.start_hours))


# --- CASAS event logs ------------------------------------------------------

def _split_event_row(line: str) -> list[str]:
    if "," in line:
        return [f.strip() for f in next(csv.reader([line]))]
    return line.split()


def activity_runs(stream: Stream, activity_filter: str, skip_errors: bool = False) -> list[tuple[dt.datetime, dt.datetime]]:
    """(first, last) timestamps of each maximal run of consecutive rows labelled ``activity_filter``.

    Rows are ``date time sensor translate1 translate2 message sensorType activity``
    (CASAS layout) or the short ``date time sensor message activity``; a row
    of four fields carries no activity label and breaks any run.
    """
    runs: list[list[dt.datetime]] = []
    in_run = False
    for line_no, line in enumerate(_text(stream), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = _split_event_row(line)
        if line_no == 1 and fields and fields[0].lower() == "date":
            continue
        try:
            if len(fields) not in (4, 5, 8):
                raise MalformedRow(line_no, f"expected 4, 5 or 8 fields, got {len(fields)}")
            try:
                t = parse_timestamp(f"{fields[0]} {fields[1]}")
            except ValueError:
                raise MalformedRow(line_no, f"unparseable timestamp {fields[0]} {fields[1]}") from None
        except MalformedRow as exc:
            if not skip_errors:
                raise
            log.warning("skipping %s", exc)
            continue
        label = fields[-1] if len(fields) > 4 else None
        if label == activity_filter:
            if in_run:
                runs[-1][1] = t
            else:
                runs.append([t, t])
                in_run = True
        else:
            in_run = False
    return [(s, e) for s, e in runs]


def parse_event_log(stream: Stream, activity_filter: str, skip_errors: bool = False) -> list[ActivityInterval]:
    """One interval per run of ``activity_filter`` rows; zero-duration runs are dropped."""
    runs = activity_runs(stream, activity_filter, skip_errors)
    if not runs:
        raise EmptyResult(f"no rows labelled {activity_filter!r}")
    out = []
    for s, e in runs:
        if e <= s:
            continue
        try:
            out.append(normalize_interval(s, e, activity_filter))
        except HabitMinerError as exc:
            log.warning("dropping run %s -> %s: %s", s, e, exc)
    return out


# --- canonical intervals CSV -----------------------------------------------

def format_hours(x: float) -> str:
    """Shortest round-tripping decimal, with at least four fractional digits."""
    return np.format_float_positional(float(x), unique=True, min_digits=4, trim="k")


def write_intervals_csv(intervals: Iterable[ActivityInterval]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INTERVALS_HEADER)
    for iv in intervals:
        w.writerow([iv.activity, iv.date.isoformat(), format_hours(iv.start_hours), format_hours(iv.end_hours)])
    return buf.getvalue().encode("utf-8")


def read_intervals_csv(stream: Stream) -> list[ActivityInterval]:
    reader = csv.reader(_text(stream))
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip() for h in header] != INTERVALS_HEADER:
        raise MalformedRow(1, f"expected header {','.join(INTERVALS_HEADER)}")
    out = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise MalformedRow(line_no, f"expected 4 fields, got {len(row)}")
        try:
            date = dt.date.fromisoformat(row[1])
            start, end = float(row[2]), float(row[3])
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from None
        try:
            check_interval(start, end)
        except InvariantViolation as exc:
            raise InvariantViolation(f"line {line_no}: {exc}") from None
        out.append(ActivityInterval(date, start, end, row[0]))
    return out
