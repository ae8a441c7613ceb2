"""Inductive discovery of process trees and their translation to workflow nets.

The miner works on a multiset of label sequences.  At each level it
handles empty traces, single-activity base cases, then looks for an
exclusive, sequence, parallel or loop cut on the directly-follows graph
of the sublog (after removing edges whose count is below
``noise_threshold`` times the strongest outgoing edge of their source).
Without a cut it falls back to a flower model.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .events import EventLog, Naming
from .petri import NetBuilder, WorkflowNet, fuse_series_places


class Op(enum.Enum):
    ACTIVITY = "activity"
    TAU = "tau"
    SEQUENCE = "->"
    XOR = "X"
    PARALLEL = "+"
    LOOP = "*"


@dataclass(frozen=True)
class ProcessTree:
    op: Op
    label: str | None = None
    children: tuple["ProcessTree", ...] = ()

    def __post_init__(self):
        if self.op is Op.ACTIVITY and self.label is None:
            raise ValueError("activity leaf needs a label")
        if self.op is Op.LOOP and len(self.children) != 2:
            raise ValueError("loop has exactly a body and a redo child")
        if self.op in (Op.SEQUENCE, Op.XOR, Op.PARALLEL) and len(self.children) < 2:
            raise ValueError(f"{self.op.name} needs at least two children")

    def __str__(self):
        if self.op is Op.ACTIVITY:
            return self.label
        if self.op is Op.TAU:
            return "tau"
        return f"{self.op.value}({', '.join(map(str, self.children))})"

    def activities(self) -> set[str]:
        if self.op is Op.ACTIVITY:
            return {self.label}
        return set().union(*(c.activities() for c in self.children)) if self.children else set()

    def _sort_key(self):
        acts = self.activities()
        return (0, "") if not acts else (1, min(acts))


TAU_LEAF = ProcessTree(Op.TAU)


def leaf(label: str) -> ProcessTree:
    return ProcessTree(Op.ACTIVITY, label)


def seq(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(Op.SEQUENCE, None, tuple(children))


def xor(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(Op.XOR, None, tuple(sorted(children, key=ProcessTree._sort_key)))


def par(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(Op.PARALLEL, None, tuple(sorted(children, key=ProcessTree._sort_key)))


def loop(body: ProcessTree, redo: ProcessTree) -> ProcessTree:
    return ProcessTree(Op.LOOP, None, (body, redo))


Sublog = Counter  # label tuple -> multiplicity


def _dfg(log: Sublog):
    edges: Counter = Counter()
    starts: Counter = Counter()
    ends: Counter = Counter()
    for t, c in log.items():
        if not t:
            continue
        starts[t[0]] += c
        ends[t[-1]] += c
        for a, b in zip(t, t[1:]):
            edges[(a, b)] += c
    return edges, starts, ends


def _filter_edges(edges: Counter, threshold: float) -> set[tuple[str, str]]:
    if threshold <= 0:
        return set(edges)
    strongest: dict[str, int] = {}
    for (a, _), c in edges.items():
        strongest[a] = max(strongest.get(a, 0), c)
    return {(a, b) for (a, b), c in edges.items() if c >= threshold * strongest[a]}


def _ordered(groups: Iterable[Iterable[str]]) -> list[frozenset[str]]:
    return sorted((frozenset(g) for g in groups), key=min)


def _xor_cut(alphabet, edges):
    g = nx.Graph()
    g.add_nodes_from(alphabet)
    g.add_edges_from((a, b) for a, b in edges if a != b)
    comps = list(nx.connected_components(g))
    return _ordered(comps) if len(comps) > 1 else None


def _sequence_cut(alphabet, edges):
    g = nx.DiGraph()
    g.add_nodes_from(alphabet)
    g.add_edges_from(edges)
    reach = {a: nx.descendants(g, a) for a in alphabet}
    sccs = [frozenset(c) for c in nx.strongly_connected_components(g)]
    if len(sccs) < 2:
        return None
    parent = list(range(len(sccs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def reaches(x, y):
        return any(b in reach[a] for a in x for b in y)

    for i in range(len(sccs)):
        for j in range(i + 1, len(sccs)):
            if not reaches(sccs[i], sccs[j]) and not reaches(sccs[j], sccs[i]):
                parent[find(i)] = find(j)
    merged: dict[int, set[str]] = {}
    for i, c in enumerate(sccs):
        merged.setdefault(find(i), set()).update(c)
    groups = [frozenset(g) for g in merged.values()]
    if len(groups) < 2:
        return None
    # order by how many groups each one reaches
    rank = {x: sum(reaches(x, y) for y in groups if y is not x) for x in groups}
    groups.sort(key=lambda x: (-rank[x], min(x)))
    for i, gi in enumerate(groups):
        for gj in groups[i + 1:]:
            for a in gi:
                for b in gj:
                    if b not in reach[a] or a in reach[b]:
                        return None
    return groups


def _parallel_cut(alphabet, edges, starts, ends):
    g = nx.Graph()
    g.add_nodes_from(alphabet)
    al = sorted(alphabet)
    for i, a in enumerate(al):
        for b in al[i + 1:]:
            if not ((a, b) in edges and (b, a) in edges):
                g.add_edge(a, b)
    comps = _ordered(nx.connected_components(g))
    if len(comps) < 2:
        return None
    good = [c for c in comps if c & set(starts) and c & set(ends)]
    bad = [c for c in comps if not (c & set(starts) and c & set(ends))]
    if not good:
        return None
    if bad:
        good[0] = good[0].union(*bad)
    return _ordered(good) if len(good) > 1 else None


def _loop_cut(alphabet, edges, starts, ends):
    s, e = set(starts), set(ends)
    body = s | e
    rest = set(alphabet) - body
    if not rest:
        return None
    g = nx.Graph()
    g.add_nodes_from(rest)
    g.add_edges_from((a, b) for a, b in edges if a in rest and b in rest and a != b)
    groups = [set(c) for c in _ordered(nx.connected_components(g))]

    def absorb(pred):
        nonlocal groups, body
        keep = []
        for grp in groups:
            if pred(grp):
                body |= grp
            else:
                keep.append(grp)
        groups = keep

    # entered from a start activity that is not an end activity
    absorb(lambda grp: any(a in s - e and b in grp for a, b in edges))
    # leaving into an end activity that is not a start activity
    absorb(lambda grp: any(a in grp and b in e - s for a, b in edges))
    # redo activities must return to every start activity ...
    absorb(lambda grp: any(
        any((a, x) in edges for x in s) and not all((a, x) in edges for x in s) for a in grp))
    # ... and be entered from every end activity
    absorb(lambda grp: any(
        any((x, a) in edges for x in e) and not all((x, a) in edges for x in e) for a in grp))
    if not groups:
        return None
    return [frozenset(body), frozenset().union(*groups)]


def _split_xor(log: Sublog, groups) -> list[Sublog]:
    subs = [Counter() for _ in groups]
    for t, c in log.items():
        counts = [sum(1 for a in t if a in g) for g in groups]
        k = counts.index(max(counts))
        subs[k][tuple(a for a in t if a in groups[k])] += c
    return subs


def _split_sequence(log: Sublog, groups) -> list[Sublog]:
    subs = [Counter() for _ in groups]
    index = {a: k for k, g in enumerate(groups) for a in g}
    for t, c in log.items():
        pos = 0
        for k in range(len(groups)):
            if k == len(groups) - 1:
                cut = len(t)
            else:
                # split point keeping the most events of group k before and later groups after
                best, cut = None, pos
                for p in range(pos, len(t) + 1):
                    score = sum(1 for a in t[pos:p] if index[a] == k) + \
                        sum(1 for a in t[p:] if index[a] > k)
                    if best is None or score > best:
                        best, cut = score, p
            subs[k][tuple(a for a in t[pos:cut] if index[a] == k)] += c
            pos = cut
    return subs


def _split_parallel(log: Sublog, groups) -> list[Sublog]:
    subs = [Counter() for _ in groups]
    for t, c in log.items():
        for k, g in enumerate(groups):
            subs[k][tuple(a for a in t if a in g)] += c
    return subs


def _split_loop(log: Sublog, body, redo) -> tuple[Sublog, Sublog]:
    bsub, rsub = Counter(), Counter()
    for t, c in log.items():
        segs: list[tuple[bool, list[str]]] = []
        for a in t:
            in_body = a in body
            if segs and segs[-1][0] == in_body:
                segs[-1][1].append(a)
            else:
                segs.append((in_body, [a]))
        # body and redo segments must alternate, starting and ending with body
        if segs and not segs[0][0]:
            segs.insert(0, (True, []))
        if segs and not segs[-1][0]:
            segs.append((True, []))
        for in_body, s in segs:
            (bsub if in_body else rsub)[tuple(s)] += c
    return bsub, rsub


def _flower(alphabet) -> ProcessTree:
    acts = [leaf(a) for a in sorted(alphabet)]
    body = acts[0] if len(acts) == 1 else xor(*acts)
    return loop(body, TAU_LEAF)


def _mine(log: Sublog, threshold: float, depth: int = 0) -> ProcessTree:
    log = Counter({t: c for t, c in log.items() if c > 0})
    total = sum(log.values())
    nonempty = Counter({t: c for t, c in log.items() if t})
    if not nonempty:
        return TAU_LEAF
    empty = total - sum(nonempty.values())
    if empty:
        if threshold > 0 and empty < threshold * total:
            log = nonempty
        else:
            return xor(TAU_LEAF, _mine(nonempty, threshold, depth + 1))
    alphabet = {a for t in log for a in t}
    if len(alphabet) == 1:
        (a,) = alphabet
        if all(len(t) == 1 for t in log):
            return leaf(a)
        return loop(leaf(a), TAU_LEAF)
    all_edges, starts, ends = _dfg(log)
    edges = _filter_edges(all_edges, threshold)

    groups = _xor_cut(alphabet, edges)
    if groups:
        return xor(*(_mine(s, threshold, depth + 1) for s in _split_xor(log, groups)))
    groups = _sequence_cut(alphabet, edges)
    if groups:
        return seq(*(_mine(s, threshold, depth + 1) for s in _split_sequence(log, groups)))
    groups = _parallel_cut(alphabet, edges, starts, ends)
    if groups:
        return par(*(_mine(s, threshold, depth + 1) for s in _split_parallel(log, groups)))
    groups = _loop_cut(alphabet, edges, starts, ends)
    if groups:
        bsub, rsub = _split_loop(log, *groups)
        return loop(_mine(bsub, threshold, depth + 1), _mine(rsub, threshold, depth + 1))
    return _flower(alphabet)


def discover_tree_from_sequences(sequences: Iterable[Sequence[str]] | Counter,
                                 noise_threshold: float = 0.0) -> ProcessTree:
    if not 0 <= noise_threshold < 1:
        raise ValueError("noise_threshold must be in [0, 1)")
    log = sequences if isinstance(sequences, Counter) else Counter(tuple(s) for s in sequences)
    if not log:
        raise ValueError("empty log")
    return _mine(log, noise_threshold)


def discover_tree(log: EventLog, noise_threshold: float = 0.0) -> ProcessTree:
    """Process tree for the label sequences of ``log``."""
    return discover_tree_from_sequences(log.label_sequences(), noise_threshold)


def tree_to_wfnet(tree: ProcessTree, reduce: bool = True) -> WorkflowNet:
    """Block-structured translation; the result is safe and sound.

    Loops and parallel blocks get private entry and exit places joined
    to their surroundings by silent transitions, so that siblings in an
    exclusive choice never share a place that is revisited.  With
    ``reduce`` the net is simplified by fusion of series places.
    """
    b = NetBuilder()
    counter = [0]

    def fresh(kind: str) -> str:
        counter[0] += 1
        return f"{kind}{counter[0]}"

    def build(node: ProcessTree, src: str, dst: str) -> None:
        if node.op is Op.ACTIVITY:
            b.chain(src, b.transition(fresh("t"), node.label), dst)
        elif node.op is Op.TAU:
            b.chain(src, b.transition(fresh("tau")), dst)
        elif node.op is Op.SEQUENCE:
            points = [src] + [b.place(fresh("p")) for _ in node.children[1:]] + [dst]
            for child, a, z in zip(node.children, points, points[1:]):
                build(child, a, z)
        elif node.op is Op.XOR:
            for child in node.children:
                build(child, src, dst)
        elif node.op is Op.PARALLEL:
            split, join = b.transition(fresh("split")), b.transition(fresh("join"))
            b.arc(src, split)
            b.arc(join, dst)
            for child in node.children:
                a, z = b.place(fresh("p")), b.place(fresh("p"))
                b.arc(split, a)
                b.arc(z, join)
                build(child, a, z)
        elif node.op is Op.LOOP:
            a, z = b.place(fresh("p")), b.place(fresh("p"))
            b.chain(src, b.transition(fresh("tau")), a)
            b.chain(z, b.transition(fresh("tau")), dst)
            body, redo = node.children
            build(body, a, z)
            build(redo, z, a)
        else:  # pragma: no cover
            raise ValueError(node.op)

    i, f = b.place("i"), b.place("f")
    build(tree, i, f)
    wf = b.workflow(i, f)
    return fuse_series_places(wf) if reduce else wf


def discover_cm_model(log: EventLog, naming: Naming, threshold: float = 0.0) -> WorkflowNet:
    """Conventional-miner baseline: rename, mine a tree, translate."""
    if len(log) == 0:
        raise ValueError("empty log")
    return tree_to_wfnet(discover_tree(log.renamed(naming), threshold))


def inductive_miner(log: EventLog, threshold: float = 0.0) -> WorkflowNet:
    """Log-to-net discovery under the log's own naming (the INDA interface)."""
    if len(log) == 0:
        raise ValueError("empty log")
    return tree_to_wfnet(discover_tree(log, threshold))
