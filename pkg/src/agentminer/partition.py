"""Agent trace sets, interaction logs and agent logs.

An agent trace is a maximal run of events of one case performed by the
same agent without an event of that case by another agent in between.
Within a case, sorted by (timestamp, id), the agent traces are exactly
the blocks obtained by cutting wherever the agent changes.
"""
from __future__ import annotations

from typing import Iterable

from .events import Event, EventLog, EventSelection, Naming, Trace, case_trace_set


def agent_trace_set(selection: Iterable[Event]) -> list[Trace]:
    """Agent traces ordered by their first event."""
    out: list[Trace] = []
    for case_trace in case_trace_set(selection):
        block: list[Event] = []
        for e in case_trace:
            if block and e.agent != block[-1].agent:
                out.append(Trace(tuple(block)))
                block = []
            block.append(e)
        out.append(Trace(tuple(block)))
    out.sort(key=lambda t: t[0].key)
    return out


def interaction_log(selection: EventSelection) -> EventLog:
    """First events of all agent traces, grouped into case traces, named by agent."""
    firsts = EventSelection(t[0] for t in agent_trace_set(selection))
    return EventLog(firsts, tuple(case_trace_set(firsts)), Naming.AGENT)


def agent_log(selection: EventSelection, agent: str) -> EventLog:
    """Events and agent traces of ``agent``, named by (agent, activity)."""
    own = [e for e in selection if e.agent == agent]
    if not own:
        raise KeyError(f"unknown agent {agent!r}")
    traces = tuple(t for t in agent_trace_set(selection) if t[0].agent == agent)
    return EventLog(EventSelection(own), traces, Naming.AAL)


def agent_logs(selection: EventSelection) -> dict[str, EventLog]:
    """Agent log of every agent, keyed in order of first appearance."""
    traces = agent_trace_set(selection)
    by_agent: dict[str, list[Trace]] = {a: [] for a in selection.agents()}
    for t in traces:
        by_agent[t[0].agent].append(t)
    return {
        a: EventLog(EventSelection(e for t in ts for e in t), tuple(ts), Naming.AAL)
        for a, ts in by_agent.items()
    }
