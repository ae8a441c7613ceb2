"""Grouping agent instances into agent types by DFG similarity."""
from __future__ import annotations

import csv
import io
from typing import Mapping

from .dfg import Dfg, build_dfg
from .events import EventSelection, Naming
from .partition import agent_logs

DEFAULT_DISTANCE_THRESHOLD = 0.5


def instance_dfgs(selection: EventSelection) -> dict[str, Dfg]:
    """DFG of every agent instance's agent log under activity labels.

    Keys follow the order in which agents first appear in the selection.
    """
    if len(selection) == 0:
        raise ValueError("empty selection")
    return {a: build_dfg(log.renamed(Naming.AOL)) for a, log in agent_logs(selection).items()}


def dfg_distance(d1: Dfg, d2: Dfg) -> float:
    """``1 - max(|E1 & E2| / |E1|, |E1 & E2| / |E2|)`` over edge sets.

    Edgeless DFGs: both empty gives 0 when their activity sets meet and 1
    otherwise; exactly one empty gives 1.
    """
    e1, e2 = d1.edge_set, d2.edge_set
    if not e1 and not e2:
        return 0.0 if set(d1.activities) & set(d2.activities) else 1.0
    if not e1 or not e2:
        return 1.0
    common = len(e1 & e2)
    return 1.0 - max(common / len(e1), common / len(e2))


def distance_matrix(dfgs: Mapping[str, Dfg]) -> dict[tuple[str, str], float]:
    names = list(dfgs)
    out = {}
    for i, a in enumerate(names):
        out[(a, a)] = dfg_distance(dfgs[a], dfgs[a])
        for b in names[i + 1:]:
            d = dfg_distance(dfgs[a], dfgs[b])
            out[(a, b)] = out[(b, a)] = d
    return out


def cluster_agents(dfgs: Mapping[str, Dfg],
                   distance_threshold: float = DEFAULT_DISTANCE_THRESHOLD) -> dict[str, str]:
    """Complete-linkage agglomerative clustering of agent instances.

    Clusters merge while the closest pair is within ``distance_threshold``.
    Ties go to the lexicographically smallest pair of clusters.  Types
    are named ``a1, a2, ...`` in order of first appearance (key order of
    ``dfgs``) of each cluster's lexicographically smallest member.
    """
    if not dfgs:
        raise ValueError("no agent instances")
    order = {a: k for k, a in enumerate(dfgs)}
    dist = distance_matrix(dfgs)
    clusters: list[tuple[str, ...]] = [(a,) for a in sorted(dfgs)]

    def linkage(x, y):
        return max(dist[(a, b)] for a in x for b in y)

    while len(clusters) > 1:
        best = None
        for i, x in enumerate(clusters):
            for y in clusters[i + 1:]:
                key = (linkage(x, y), x, y)
                if best is None or key < best:
                    best = key
        d, x, y = best
        if d > distance_threshold:
            break
        clusters = [c for c in clusters if c is not x and c is not y]
        clusters.append(tuple(sorted(x + y)))
        clusters.sort()
    clusters.sort(key=lambda c: order[min(c)])
    return {a: f"a{k + 1}" for k, c in enumerate(clusters) for a in c}


def relabel_to_types(selection: EventSelection, assignment: Mapping[str, str]) -> EventSelection:
    """Replace every event's agent instance by its agent type."""
    missing = sorted({e.agent for e in selection} - set(assignment))
    if missing:
        raise KeyError(f"agent instance {missing[0]!r} has no type")
    return EventSelection(e.with_agent(assignment[e.agent]) for e in selection)


def identify_agent_types(selection: EventSelection,
                         distance_threshold: float = DEFAULT_DISTANCE_THRESHOLD):
    """Cluster instances and relabel; returns (typed selection, assignment)."""
    assignment = cluster_agents(instance_dfgs(selection), distance_threshold)
    return relabel_to_types(selection, assignment), assignment


def distance_matrix_csv(dfgs: Mapping[str, Dfg]) -> str:
    names = list(dfgs)
    dist = distance_matrix(dfgs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["agent", *names])
    for a in names:
        w.writerow([a, *(f"{dist[(a, b)]:.6f}" for b in names)])
    return buf.getvalue()


def assignment_csv(assignment: Mapping[str, str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "type"])
    for a, t in assignment.items():
        w.writerow([a, t])
    return buf.getvalue()
