"""Reading and writing event logs, the variant frequency filter, and a
seeded generator for the health-surveillance example process."""
from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .events import Event, EventSelection, case_log

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
ISO = "iso"
EPOCH_MS = "epoch-ms"


class LogFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnMapping:
    """Which CSV columns hold the mandatory attributes.

    ``timestamp_format`` is ``"iso"`` (ISO-8601, offset optional, UTC
    assumed without one, integer epoch milliseconds accepted as a
    fallback), ``"epoch-ms"``, or a :func:`datetime.strptime` pattern.
    """

    case_column: str = "case"
    activity_column: str = "activity"
    agent_column: str = "agent"
    timestamp_column: str = "timestamp"
    timestamp_format: str = ISO

    def __post_init__(self):
        cols = self.columns
        if any(not c for c in cols) or len(set(cols)) != 4:
            raise ValueError("column names must be nonempty and distinct")

    @property
    def columns(self) -> tuple[str, str, str, str]:
        return (self.case_column, self.activity_column, self.agent_column, self.timestamp_column)


def _micros(dt: datetime) -> int:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    d = dt - EPOCH
    return (d.days * 86_400 + d.seconds) * 1_000_000 + d.microseconds


def parse_timestamp(text: str, fmt: str = ISO) -> int:
    """Microseconds since the epoch."""
    text = text.strip()
    if fmt == EPOCH_MS:
        return int(text) * 1000
    if fmt == ISO:
        try:
            return _micros(datetime.fromisoformat(text.replace("Z", "+00:00")))
        except ValueError:
            if text.lstrip("-").isdigit():
                return int(text) * 1000
            raise
    return _micros(datetime.strptime(text, fmt))


def format_timestamp(micros: int) -> str:
    return (EPOCH + timedelta(microseconds=micros)).isoformat()


def _read_rows(source) -> tuple[list[str], list[list[str]]]:
    if isinstance(source, (str, Path)) and Path(source).exists():
        text = Path(source).read_text(encoding="utf-8-sig")
    elif isinstance(source, io.TextIOBase):
        text = source.read()
    else:
        raise FileNotFoundError(source)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise LogFormatError("missing header row")
    return rows[0], rows[1:]


def parse_csv(path, mapping: ColumnMapping = ColumnMapping()) -> EventSelection:
    """One event per data row; ids follow row order, starting at 0.

    Columns beyond the four mapped ones are kept as string extras.
    Row numbers in errors count the header as row 1.
    """
    header, rows = _read_rows(path)
    index = {}
    for c in mapping.columns:
        if c not in header:
            raise LogFormatError(f"missing column '{c}'")
        index[c] = header.index(c)
    names = ("case", "activity", "agent", "timestamp")
    mapped = set(index.values())
    events = []
    for k, row in enumerate(rows):
        rowno = k + 2
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise LogFormatError(f"row {rowno} has {len(row)} cells, expected {len(header)}")
        vals = {}
        for name, col in zip(names, mapping.columns):
            cell = row[index[col]]
            if cell == "":
                raise LogFormatError(f"missing attribute '{name}' at row {rowno} (column '{col}')")
            vals[name] = cell
        try:
            ts = parse_timestamp(vals["timestamp"], mapping.timestamp_format)
        except ValueError as exc:
            raise LogFormatError(
                f"unparseable timestamp {vals['timestamp']!r} at row {rowno}") from exc
        extras = {h: row[j] for j, h in enumerate(header) if j not in mapped}
        events.append(Event(len(events), ts, vals["case"], vals["activity"], vals["agent"], extras))
    return EventSelection(events)


def write_csv(selection: Iterable[Event], path=None,
              mapping: ColumnMapping = ColumnMapping()) -> str:
    """RFC-4180 export in (timestamp, id) order with ISO-8601 UTC timestamps.

    Returns the text and writes it to ``path`` when given.
    """
    events = sorted(selection, key=lambda e: e.key)
    extra_cols = sorted({k for e in events for k in e.extras} - set(mapping.columns))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow([*mapping.columns, *extra_cols])
    for e in events:
        w.writerow([e.case, e.activity, e.agent, format_timestamp(e.timestamp),
                    *(e.extras.get(c, "") for c in extra_cols)])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="")
    return text


DEFAULT_XES_KEYS = {
    "case": "concept:name",
    "activity": "concept:name",
    "agent": "org:resource",
    "timestamp": "time:timestamp",
}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attributes(elem) -> dict[str, str]:
    return {c.get("key"): c.get("value") for c in elem
            if _local(c.tag) in ("string", "date", "int", "float", "id", "boolean")}


def parse_xes(path, attribute_keys: Mapping[str, str] | None = None) -> EventSelection:
    """Events of an XES file (flat string and date attributes only)."""
    keys = {**DEFAULT_XES_KEYS, **(attribute_keys or {})}
    try:
        root = ET.parse(path).getroot() if Path(str(path)).exists() else ET.fromstring(path)
    except ET.ParseError as exc:
        raise LogFormatError(f"malformed XML: {exc}") from exc
    events = []
    index = 0
    for ti, trace in enumerate(c for c in root if _local(c.tag) == "trace"):
        case = _attributes(trace).get(keys["case"])
        if case is None:
            raise LogFormatError(f"trace {ti} lacks '{keys['case']}'")
        for ev in (c for c in trace if _local(c.tag) == "event"):
            attrs = _attributes(ev)
            vals = {}
            for name in ("activity", "agent", "timestamp"):
                if attrs.get(keys[name]) in (None, ""):
                    raise LogFormatError(f"event {index} lacks '{keys[name]}' ({name})")
                vals[name] = attrs[keys[name]]
            try:
                ts = parse_timestamp(vals["timestamp"])
            except ValueError as exc:
                raise LogFormatError(f"event {index}: bad timestamp {vals['timestamp']!r}") from exc
            extras = {k: v for k, v in attrs.items()
                      if k not in (keys["activity"], keys["agent"], keys["timestamp"])}
            events.append(Event(len(events), ts, case, vals["activity"], vals["agent"], extras))
            index += 1
    return EventSelection(events)


def variant_frequency_filter(selection: EventSelection, vff: float) -> EventSelection:
    """Keep the most frequent case-trace variants covering ``vff`` of all traces.

    Variants are activity sequences; equal frequencies are ordered
    lexicographically.  Whole variants are kept, so the kept share can
    exceed ``vff``.
    """
    if not 0 < vff <= 1:
        raise ValueError("vff must be in (0, 1]")
    if vff >= 1 or len(selection) == 0:
        return selection
    log = case_log(selection)
    seqs = log.label_sequences()
    counts = Counter(seqs)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    keep, covered = set(), 0
    for variant, c in ranked:
        if covered >= vff * len(seqs) - 1e-9:
            break
        keep.add(variant)
        covered += c
    return EventSelection(e for t, s in zip(log.traces, seqs) if s in keep for e in t)


TESTS = ("B-test", "U-sound", "X-ray")
THERAPIES = ("yoga", "physio", "gym", "swim")
# order in which a therapist runs the prescribed exercises of one visit
THERAPY_ORDER = ("physio", "gym", "swim", "yoga")
ROLES = {
    "d1": frozenset({"check", "analyze", "prescribe", "discharge"}),
    "d2": frozenset(TESTS), "d4": frozenset(TESTS),
    "d3": frozenset(THERAPIES), "d5": frozenset(THERAPIES),
}


def _default_probabilities() -> dict[str, float]:
    return {"B-test": 0.6, "U-sound": 0.4, "X-ray": 0.3,
            "yoga": 0.5, "physio": 0.4, "gym": 0.3, "swim": 0.2}


@dataclass(frozen=True)
class GeneratorConfig:
    cases: int = 1024
    seed: int = 7
    max_rework_rounds: int = 3
    rework_probability: float = 0.5
    prescription_probabilities: Mapping[str, float] = field(default_factory=_default_probabilities)
    therapy_sessions: int = 3
    shuffle_sessions: bool = False
    start: datetime = datetime(2023, 4, 3, 8, 0, tzinfo=timezone.utc)

    def __post_init__(self):
        if self.cases < 1:
            raise ValueError("cases must be positive")
        if self.therapy_sessions < 1:
            raise ValueError("therapy_sessions must be positive")
        if self.max_rework_rounds < 0:
            raise ValueError("max_rework_rounds must be nonnegative")
        if not 0 <= self.rework_probability <= 1:
            raise ValueError("rework_probability must be in [0, 1]")
        for a, p in self.prescription_probabilities.items():
            if a not in TESTS + THERAPIES:
                raise ValueError(f"unknown prescribable activity {a!r}")
            if not 0 <= p <= 1:
                raise ValueError(f"probability of {a!r} outside [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def _case_rng(seed: int, case: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, case]))


def _subset(rng, pool, probs) -> list[str]:
    """Nonempty random subset of ``pool``, kept in pool order."""
    chosen = [a for a in pool if rng.random() < probs.get(a, 0.5)]
    if not chosen:
        chosen = [pool[int(rng.integers(len(pool)))]]
    return chosen


def _hours(rng, lo, hi) -> int:
    return int(rng.uniform(lo, hi) * 3_600_000_000)


def _session(rng, start, agent, activities, shuffle, gap=(0.2, 1.5)):
    if shuffle:
        activities = [activities[k] for k in rng.permutation(len(activities))]
    out, clock = [], start
    for a in activities:
        out.append((clock, a, agent))
        clock += _hours(rng, *gap)
    return out


def _generate_case(cfg: GeneratorConfig, k: int) -> list[tuple[int, str, str]]:
    rng = _case_rng(cfg.seed, k)
    t = _micros(cfg.start) + k * 3_600_000_000 + _hours(rng, 0, 1)
    out = []

    def emit(agent, activity, gap):
        nonlocal t
        t += gap
        out.append((t, activity, agent))

    emit("d1", "check", 0)
    emit("d1", "analyze", _hours(rng, 0.1, 24))
    for _ in range(cfg.max_rework_rounds):
        if rng.random() >= cfg.rework_probability:
            break
        emit("d1", "prescribe", _hours(rng, 0.1, 24))
        tester = "d2" if rng.random() < 0.5 else "d4"
        therapist = "d3" if rng.random() < 0.5 else "d5"
        probs = cfg.prescription_probabilities
        # tests in one visit, therapy in repeated visits; both tracks run
        # on their own clocks, so their events may interleave
        events = _session(rng, t + _hours(rng, 1, 72), tester,
                          _subset(rng, TESTS, probs), cfg.shuffle_sessions)
        plan = _subset(rng, THERAPY_ORDER, probs)
        clock = t + _hours(rng, 1, 72)
        for _ in range(1 + int(rng.integers(cfg.therapy_sessions))):
            events += _session(rng, clock, therapist, plan, cfg.shuffle_sessions)
            clock += _hours(rng, 24, 96)
        events.sort()
        out.extend(events)
        t = events[-1][0]
        emit("d1", "check", _hours(rng, 1, 72))
        emit("d1", "analyze", _hours(rng, 0.1, 24))
    emit("d1", "discharge", _hours(rng, 0.1, 24))
    return out


def generate_health_log(config: GeneratorConfig = GeneratorConfig()) -> EventSelection:
    """Seeded log of the health-surveillance process.

    Each case is drawn from its own Philox stream keyed by (seed, case
    index), so a case does not depend on how many others are generated.
    """
    events = []
    width = len(str(config.cases))
    for k in range(config.cases):
        case = f"p{k + 1:0{width}d}"
        for ts, activity, agent in _generate_case(config, k):
            events.append(Event(len(events), ts, case, activity, agent))
    return EventSelection(events)


def role_violations(selection: Iterable[Event]) -> list[Event]:
    """Events whose agent performs an activity outside its role."""
    return [e for e in selection if e.agent in ROLES and e.activity not in ROLES[e.agent]]

