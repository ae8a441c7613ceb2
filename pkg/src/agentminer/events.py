"""Events, event selections, traces and event logs.

An event carries four mandatory attributes (timestamp, case, activity,
agent) plus free-form string extras.  Timestamps are integer microseconds
since the epoch; ties are broken by the event id, which log readers assign
as a monotone ingestion counter.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class MissingAttributeError(ValueError):
    """An event lacks an attribute required by a naming function."""

    def __init__(self, attribute: str, event_id: int | None = None):
        self.attribute = attribute
        self.event_id = event_id
        where = "" if event_id is None else f" (event {event_id})"
        super().__init__(f"missing attribute '{attribute}'{where}")


@dataclass(frozen=True)
class Event:
    id: int
    timestamp: int
    case: str
    activity: str
    agent: str
    extras: Mapping[str, str] = field(default_factory=dict, compare=False, hash=False)

    @property
    def key(self) -> tuple[int, int]:
        """Sort key giving the strict total order of a selection."""
        return (self.timestamp, self.id)

    def with_agent(self, agent: str) -> "Event":
        return Event(self.id, self.timestamp, self.case, self.activity, agent, self.extras)


class EventSelection(Sequence[Event]):
    """A finite set of events, stored in (timestamp, id) order."""

    __slots__ = ("_events",)

    def __init__(self, events: Iterable[Event] = ()):
        evs = sorted(events, key=lambda e: e.key)
        seen = set()
        for e in evs:
            if e.id in seen:
                raise ValueError(f"duplicate event id {e.id}")
            seen.add(e.id)
        self._events = tuple(evs)

    def __getitem__(self, i):
        return self._events[i]

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __eq__(self, other) -> bool:
        if isinstance(other, EventSelection):
            return self._events == other._events
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._events)

    def __repr__(self) -> str:
        return f"EventSelection({len(self._events)} events)"

    @property
    def events(self) -> tuple[Event, ...]:
        return self._events

    def cases(self) -> list[str]:
        """Distinct case ids in order of first appearance."""
        return list(dict.fromkeys(e.case for e in self._events))

    def agents(self) -> list[str]:
        """Distinct agent values in order of first appearance."""
        return list(dict.fromkeys(e.agent for e in self._events))

    def activities(self) -> list[str]:
        return list(dict.fromkeys(e.activity for e in self._events))


@dataclass(frozen=True)
class Trace:
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError("a trace is nonempty")
        keys = [e.key for e in self.events]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError("trace events must be strictly increasing by (timestamp, id)")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.events)


class Naming(enum.Enum):
    AOL = "AOL"
    AAL = "AAL"
    AGENT = "AgentOnly"

    @classmethod
    def parse(cls, text: str) -> "Naming":
        for n in cls:
            if text.lower() in (n.value.lower(), n.name.lower()):
                return n
        raise ValueError(f"unknown naming {text!r}")


AAL_SEPARATOR = "|"


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace("|", "\\|")


def _unescape(value: str) -> str:
    out, it = [], iter(value)
    for ch in it:
        if ch == "\\":
            out.append(next(it, ""))
        else:
            out.append(ch)
    return "".join(out)


def aal_label(agent: str, activity: str) -> str:
    """Render an (agent, activity) pair as ``agent|activity``."""
    return f"{_escape(agent)}{AAL_SEPARATOR}{_escape(activity)}"


def split_aal(label: str) -> tuple[str, str]:
    """Inverse of :func:`aal_label`."""
    i = 0
    while i < len(label):
        ch = label[i]
        if ch == "\\":
            i += 2
            continue
        if ch == AAL_SEPARATOR:
            return _unescape(label[:i]), _unescape(label[i + 1:])
        i += 1
    raise ValueError(f"not an agent|activity label: {label!r}")


def name_of(event: Event, naming: Naming) -> str:
    if naming is Naming.AOL:
        if not event.activity:
            raise MissingAttributeError("activity", event.id)
        return event.activity
    if naming is Naming.AGENT:
        if not event.agent:
            raise MissingAttributeError("agent", event.id)
        return event.agent
    if naming is Naming.AAL:
        if not event.agent:
            raise MissingAttributeError("agent", event.id)
        if not event.activity:
            raise MissingAttributeError("activity", event.id)
        return aal_label(event.agent, event.activity)
    raise ValueError(f"unknown naming {naming!r}")


def case_trace_set(selection: Iterable[Event]) -> list[Trace]:
    """One trace per case, ordered by (timestamp, id).

    Traces are returned in order of their first event.
    """
    groups: dict[str, list[Event]] = {}
    for e in sorted(selection, key=lambda e: e.key):
        groups.setdefault(e.case, []).append(e)
    return [Trace(tuple(evs)) for evs in groups.values()]


@dataclass(frozen=True)
class EventLog:
    selection: EventSelection
    traces: tuple[Trace, ...]
    naming: Naming

    def __post_init__(self):
        ids = [e.id for t in self.traces for e in t]
        if len(ids) != len(set(ids)) or set(ids) != {e.id for e in self.selection}:
            raise ValueError("traces must partition the selection")

    def label_sequences(self) -> list[tuple[str, ...]]:
        return [tuple(name_of(e, self.naming) for e in t) for t in self.traces]

    def renamed(self, naming: Naming) -> "EventLog":
        return EventLog(self.selection, self.traces, naming)

    def __len__(self) -> int:
        return len(self.traces)


def case_log(selection: EventSelection, naming: Naming = Naming.AOL) -> EventLog:
    """The classical log: case traces under the given naming."""
    return EventLog(selection, tuple(case_trace_set(selection)), naming)


def log_from_sequences(
    sequences: Sequence[Sequence[str]],
    naming: Naming = Naming.AOL,
    agent: str = "x",
) -> EventLog:
    """Build a log whose label sequences are ``sequences``.

    Handy for tests and for feeding sub-discovery algorithms with
    synthetic input.  Under ``Naming.AGENT`` the labels are stored as
    agents; otherwise as activities performed by ``agent``.
    """
    events = []
    ts = 0
    for ci, seq in enumerate(sequences):
        for label in seq:
            ts += 1
            if naming is Naming.AGENT:
                events.append(Event(len(events), ts, f"c{ci}", label, label))
            elif naming is Naming.AAL:
                ag, act = split_aal(label)
                events.append(Event(len(events), ts, f"c{ci}", act, ag))
            else:
                events.append(Event(len(events), ts, f"c{ci}", label, agent))
    sel = EventSelection(events)
    return case_log(sel, naming)
