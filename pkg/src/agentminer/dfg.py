"""Directly-follows graphs, the activity frequency filter and DFG-to-net translation."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .events import EventLog
from .petri import NetBuilder, WorkflowNet


@dataclass
class Dfg:
    activities: Counter = field(default_factory=Counter)
    edges: Counter = field(default_factory=Counter)
    starts: Counter = field(default_factory=Counter)
    ends: Counter = field(default_factory=Counter)

    def __post_init__(self):
        acts = set(self.activities)
        for a, b in self.edges:
            if a not in acts or b not in acts:
                raise ValueError(f"edge ({a}, {b}) touches an unknown activity")
        for a in (*self.starts, *self.ends):
            if a not in acts:
                raise ValueError(f"start/end activity {a!r} unknown")

    @property
    def edge_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.edges)

    def successors(self, a: str) -> list[str]:
        return sorted(y for (x, y) in self.edges if x == a)

    def predecessors(self, a: str) -> list[str]:
        return sorted(x for (x, y) in self.edges if y == a)

    def __bool__(self):
        return bool(self.activities)


def dfg_from_sequences(sequences: Iterable[Sequence[str]]) -> Dfg:
    d = Dfg()
    for seq in sequences:
        if not seq:
            continue
        d.starts[seq[0]] += 1
        d.ends[seq[-1]] += 1
        d.activities.update(seq)
        d.edges.update(zip(seq, seq[1:]))
    return d


def build_dfg(log: EventLog) -> Dfg:
    """DFG of a log under its naming function."""
    return dfg_from_sequences(log.label_sequences())


def _reach(roots: Iterable[str], step) -> set[str]:
    seen = set(roots)
    todo = list(seen)
    while todo:
        for y in step(todo.pop()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def filter_dfg(dfg: Dfg, ff: float) -> Dfg:
    """Activity frequency filter.

    Keeps the most frequent activities (ties broken lexicographically)
    until they cover at least ``ff`` of all occurrences, drops everything
    touching removed activities, then promotes activities without
    incoming edges to start activities and those without outgoing edges
    to end activities.  Activities still unreachable from a start (or
    unable to reach an end) are promoted as well so that the result
    stays translatable.
    """
    if not 0 < ff <= 1:
        raise ValueError("ff must be in (0, 1]")
    if ff >= 1:
        return Dfg(Counter(dfg.activities), Counter(dfg.edges), Counter(dfg.starts), Counter(dfg.ends))
    total = sum(dfg.activities.values())
    ranked = sorted(dfg.activities.items(), key=lambda kv: (-kv[1], kv[0]))
    kept: dict[str, int] = {}
    covered = 0
    for a, c in ranked:
        if kept and covered >= ff * total - 1e-9:
            break
        kept[a] = c
        covered += c
    edges = Counter({(a, b): c for (a, b), c in dfg.edges.items() if a in kept and b in kept})
    starts = Counter({a: c for a, c in dfg.starts.items() if a in kept})
    ends = Counter({a: c for a, c in dfg.ends.items() if a in kept})
    has_in = {b for (_, b) in edges}
    has_out = {a for (a, _) in edges}
    for a in sorted(kept):
        if a not in has_in and a not in starts:
            starts[a] = kept[a]
        if a not in has_out and a not in ends:
            ends[a] = kept[a]
    out = Dfg(Counter(kept), edges, starts, ends)
    succ = {a: out.successors(a) for a in kept}
    pred = {a: out.predecessors(a) for a in kept}
    for a in sorted(kept):
        if a not in _reach(out.starts, succ.__getitem__):
            out.starts[a] = kept[a]
    for a in sorted(kept):
        if a not in _reach(out.ends, pred.__getitem__):
            out.ends[a] = kept[a]
    return out


def dfg_to_wfnet(dfg: Dfg) -> WorkflowNet:
    """Translate a DFG into a workflow net with the DFG's walk language.

    Every activity ``x`` becomes ``in:x -> t:x -> out:x`` with ``t:x``
    labeled ``x``; every edge ``(x, y)`` a silent transition from
    ``out:x`` to ``in:y``; start and end activities are wired to the
    global places ``i`` and ``f`` through silent transitions.
    Activities off every start-to-end walk are dropped with a warning.
    """
    if not dfg.activities or not dfg.starts or not dfg.ends:
        raise ValueError("nothing to translate: the DFG has no start or end activity")
    succ = {a: dfg.successors(a) for a in dfg.activities}
    pred = {a: dfg.predecessors(a) for a in dfg.activities}
    live = _reach(dfg.starts, succ.__getitem__) & _reach(dfg.ends, pred.__getitem__)
    dropped = set(dfg.activities) - live
    if dropped:
        warnings.warn(f"dropping activities off every start-end walk: {sorted(dropped)}",
                      stacklevel=2)
    if not live:
        raise ValueError("nothing to translate: no start-to-end walk")
    b = NetBuilder()
    i, f = b.place("i"), b.place("f")
    for a in sorted(live):
        b.chain(b.place(f"in:{a}"), b.transition(f"t:{a}", a), b.place(f"out:{a}"))
    for a in sorted(live & set(dfg.starts)):
        b.chain(i, b.transition(f"start:{a}"), f"in:{a}")
    for a in sorted(live & set(dfg.ends)):
        b.chain(f"out:{a}", b.transition(f"end:{a}"), f)
    for (x, y) in sorted(dfg.edges):
        if x in live and y in live:
            b.chain(f"out:{x}", b.transition(f"e:{x}->{y}"), f"in:{y}")
    return b.workflow(i, f)


def dfg_to_dot(dfg: Dfg, name: str = "dfg") -> str:
    """Graphviz rendering with occurrence counts on nodes and edges."""
    def q(s):
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = [f"digraph {q(name)} {{", "  rankdir=LR;",
             '  "__start__" [shape=circle label="" style=filled fillcolor=green];',
             '  "__end__" [shape=circle label="" style=filled fillcolor=orange];']
    for a, c in sorted(dfg.activities.items()):
        lines.append(f"  {q(a)} [shape=box label={q(f'{a} ({c})')}];")
    for a, c in sorted(dfg.starts.items()):
        lines.append(f'  "__start__" -> {q(a)} [label="{c}"];')
    for (a, b), c in sorted(dfg.edges.items()):
        width = 1 + math.log1p(c) / 2
        lines.append(f'  {q(a)} -> {q(b)} [label="{c}" penwidth={width:.2f}];')
    for a, c in sorted(dfg.ends.items()):
        lines.append(f'  {q(a)} -> "__end__" [label="{c}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
