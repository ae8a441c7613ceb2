"""Labeled Petri nets and workflow nets.

Nets are immutable values.  Transition labels are strings; the silent
label is ``None`` (exported as ``TAU``).  Analyses that need the state
space (safeness, soundness, replay) explore the reachability graph from
the initial marking ``[i]`` and stop with :class:`StateBoundExceeded`
once more than ``state_bound`` distinct markings are seen.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .events import split_aal

TAU = None
DEFAULT_STATE_BOUND = 200_000


class NetError(ValueError):
    pass


class NotAWorkflowNet(NetError):
    pass


class NotEnabled(NetError):
    pass


class StateBoundExceeded(RuntimeError):
    def __init__(self, count: int, bound: int):
        self.count = count
        self.bound = bound
        super().__init__(f"more than {bound} reachable markings (explored {count})")


class LabelDiscipline(enum.Enum):
    PLAIN = "plain"
    INTERACTION = "interaction"
    MAS = "mas"
    AGENT = "agent"


@dataclass(frozen=True)
class LabeledNet:
    places: tuple[str, ...]
    transitions: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]
    labels: Mapping[str, str | None] = field(hash=False)

    def __post_init__(self):
        ps, ts = set(self.places), set(self.transitions)
        if len(ps) != len(self.places) or len(ts) != len(self.transitions):
            raise NetError("duplicate node id")
        if ps & ts:
            raise NetError(f"places and transitions overlap: {sorted(ps & ts)[:3]}")
        for a, b in self.arcs:
            if not ((a in ps and b in ts) or (a in ts and b in ps)):
                raise NetError(f"arc {a}->{b} does not connect a place and a transition")
        if set(self.labels) != ts:
            raise NetError("labels must be defined for exactly the transitions")

    def __hash__(self):
        return hash((self.places, self.transitions, self.arcs))

    @cached_property
    def _pre(self) -> dict[str, tuple[str, ...]]:
        pre: dict[str, list[str]] = {n: [] for n in (*self.places, *self.transitions)}
        for a, b in sorted(self.arcs):
            pre[b].append(a)
        return {n: tuple(v) for n, v in pre.items()}

    @cached_property
    def _post(self) -> dict[str, tuple[str, ...]]:
        post: dict[str, list[str]] = {n: [] for n in (*self.places, *self.transitions)}
        for a, b in sorted(self.arcs):
            post[a].append(b)
        return {n: tuple(v) for n, v in post.items()}

    def preset(self, node: str) -> tuple[str, ...]:
        return self._pre[node]

    def postset(self, node: str) -> tuple[str, ...]:
        return self._post[node]

    def label(self, t: str) -> str | None:
        return self.labels[t]

    def is_silent(self, t: str) -> bool:
        return self.labels[t] is None

    def observable(self) -> list[str]:
        return [t for t in self.transitions if self.labels[t] is not None]

    def observable_labels(self) -> set[str]:
        return {l for l in self.labels.values() if l is not None}


class NetBuilder:
    """Incremental construction of a :class:`LabeledNet`."""

    def __init__(self):
        self.places: dict[str, None] = {}
        self.transitions: dict[str, str | None] = {}
        self.arcs: set[tuple[str, str]] = set()

    def place(self, p: str) -> str:
        self.places[p] = None
        return p

    def transition(self, t: str, label: str | None = TAU) -> str:
        self.transitions[t] = label
        return t

    def arc(self, a: str, b: str) -> None:
        self.arcs.add((a, b))

    def chain(self, *nodes: str) -> None:
        for a, b in zip(nodes, nodes[1:]):
            self.arc(a, b)

    def fresh(self, base: str) -> str:
        name, k = base, 1
        while name in self.places or name in self.transitions:
            k += 1
            name = f"{base}#{k}"
        return name

    def add_net(self, net: LabeledNet, prefix: str = "") -> None:
        for p in net.places:
            self.place(prefix + p)
        for t in net.transitions:
            self.transition(prefix + t, net.labels[t])
        for a, b in net.arcs:
            self.arc(prefix + a, prefix + b)

    def build(self) -> LabeledNet:
        return LabeledNet(
            tuple(self.places),
            tuple(self.transitions),
            frozenset(self.arcs),
            dict(self.transitions),
        )

    def workflow(self, initial: str, final: str, check: bool = True) -> "WorkflowNet":
        return WorkflowNet(self.build(), initial, final, check=check)


class WorkflowNet:
    """A labeled net with an initial place ``i`` and a final place ``f``."""

    def __init__(self, net: LabeledNet, initial: str, final: str, check: bool = True):
        self.net = net
        self.initial = initial
        self.final = final
        if check:
            self.validate()

    def __repr__(self):
        n = self.net
        return (f"WorkflowNet({len(n.places)} places, {len(n.transitions)} transitions, "
                f"{len(n.arcs)} arcs)")

    def __eq__(self, other):
        if not isinstance(other, WorkflowNet):
            return NotImplemented
        return (self.net == other.net and dict(self.net.labels) == dict(other.net.labels)
                and (self.initial, self.final) == (other.initial, other.final))

    def __hash__(self):
        return hash((self.net, self.initial, self.final))

    def validate(self) -> None:
        n = self.net
        for p, role in ((self.initial, "initial"), (self.final, "final")):
            if p not in set(n.places):
                raise NotAWorkflowNet(f"{role} place {p!r} is not a place of the net")
        if n.preset(self.initial):
            raise NotAWorkflowNet("initial place has a nonempty preset")
        if n.postset(self.final):
            raise NotAWorkflowNet("final place has a nonempty postset")
        fwd = _closure(self.initial, n.postset)
        bwd = _closure(self.final, n.preset)
        nodes = set(n.places) | set(n.transitions)
        off = nodes - (fwd & bwd)
        if off:
            raise NotAWorkflowNet(f"nodes not on an i-f walk: {sorted(off)[:5]}")

    @property
    def places(self):
        return self.net.places

    @property
    def transitions(self):
        return self.net.transitions

    def relabeled(self, labels: Mapping[str, str | None]) -> "WorkflowNet":
        n = self.net
        return WorkflowNet(LabeledNet(n.places, n.transitions, n.arcs, dict(labels)),
                           self.initial, self.final, check=False)

    def initial_marking(self) -> "Marking":
        return Marking({self.initial: 1})

    def final_marking(self) -> "Marking":
        return Marking({self.final: 1})


def _closure(start: str, step) -> set[str]:
    seen = {start}
    todo = [start]
    while todo:
        for m in step(todo.pop()):
            if m not in seen:
                seen.add(m)
                todo.append(m)
    return seen


class Marking(Mapping[str, int]):
    """Multiset over places; zero entries are dropped."""

    __slots__ = ("_d", "_h")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] = ()):
        if isinstance(counts, Mapping):
            items = counts.items()
        else:
            acc: dict[str, int] = {}
            for p in counts:
                acc[p] = acc.get(p, 0) + 1
            items = acc.items()
        d = {}
        for p, c in items:
            if c < 0:
                raise ValueError(f"negative token count for {p}")
            if c:
                d[p] = c
        self._d = dict(sorted(d.items()))
        self._h = hash(frozenset(self._d.items()))

    def __getitem__(self, p):
        return self._d.get(p, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, p) -> bool:
        return p in self._d

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return self._h

    def __repr__(self):
        inner = ", ".join(p if c == 1 else f"{p}^{c}" for p, c in self._d.items())
        return f"[{inner}]"

    def total(self) -> int:
        return sum(self._d.values())

    def is_set(self) -> bool:
        return all(c <= 1 for c in self._d.values())


def _net_of(net) -> LabeledNet:
    return net.net if isinstance(net, WorkflowNet) else net


def enabled(net, marking: Mapping[str, int]) -> set[str]:
    n = _net_of(net)
    return {t for t in n.transitions if all(marking.get(p, 0) > 0 for p in n.preset(t))}


def fire(net, marking: Mapping[str, int], t: str) -> Marking:
    n = _net_of(net)
    if t not in n.labels:
        raise NetError(f"unknown transition {t!r}")
    if not all(marking.get(p, 0) > 0 for p in n.preset(t)):
        raise NotEnabled(f"transition {t!r} is not enabled")
    m = dict(marking)
    for p in n.preset(t):
        m[p] -= 1
    for p in n.postset(t):
        m[p] = m.get(p, 0) + 1
    return Marking(m)


class _Compiled:
    """Index-based view of a workflow net used by the state-space analyses."""

    def __init__(self, wf: WorkflowNet):
        n = wf.net
        self.wf = wf
        self.places = n.places
        self.pidx = {p: i for i, p in enumerate(n.places)}
        self.transitions = n.transitions
        self.labels = [n.labels[t] for t in n.transitions]
        self.pre = [tuple(self.pidx[p] for p in n.preset(t)) for t in n.transitions]
        self.post = [tuple(self.pidx[p] for p in n.postset(t)) for t in n.transitions]
        consumers: list[list[int]] = [[] for _ in n.places]
        self.always = []
        for ti, pre in enumerate(self.pre):
            if not pre:
                self.always.append(ti)
            for pi in pre:
                consumers[pi].append(ti)
        self.consumers = consumers
        init = [0] * len(n.places)
        init[self.pidx[wf.initial]] = 1
        self.initial = tuple(init)
        fin = [0] * len(n.places)
        fin[self.pidx[wf.final]] = 1
        self.final = tuple(fin)
        self.final_index = self.pidx[wf.final]

    def enabled(self, m: tuple[int, ...]) -> list[int]:
        cand = set(self.always)
        for pi, c in enumerate(m):
            if c:
                cand.update(self.consumers[pi])
        return sorted(ti for ti in cand if all(m[p] > 0 for p in self.pre[ti]))

    def fire(self, m: tuple[int, ...], ti: int) -> tuple[int, ...]:
        lst = list(m)
        for p in self.pre[ti]:
            lst[p] -= 1
        for p in self.post[ti]:
            lst[p] += 1
        return tuple(lst)

    def to_marking(self, m: tuple[int, ...]) -> Marking:
        return Marking({self.places[i]: c for i, c in enumerate(m) if c})


@dataclass
class ReachabilityGraph:
    """Markings reachable from ``[i]`` and the transition occurrences between them.

    ``states[k]`` is a marking as a tuple of token counts aligned with
    ``places``; ``edges`` holds ``(source, transition, target)`` triples
    of state indices and transition ids.  State 0 is the initial marking.
    """

    places: tuple[str, ...]
    states: list[tuple[int, ...]]
    edges: list[tuple[int, str, int]]
    labels: Mapping[str, str | None]
    final_state: int | None

    def marking(self, k: int) -> Marking:
        return Marking({self.places[i]: c for i, c in enumerate(self.states[k]) if c})

    def successors(self) -> list[list[tuple[str, int]]]:
        out: list[list[tuple[str, int]]] = [[] for _ in self.states]
        for s, t, d in self.edges:
            out[s].append((t, d))
        return out

    def __len__(self):
        return len(self.states)


def reachability_graph(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> ReachabilityGraph:
    if state_bound < 1:
        raise ValueError("state_bound must be >= 1")
    c = _Compiled(wf)
    index = {c.initial: 0}
    states = [c.initial]
    edges = []
    queue = deque([0])
    while queue:
        k = queue.popleft()
        m = states[k]
        for ti in c.enabled(m):
            m2 = c.fire(m, ti)
            j = index.get(m2)
            if j is None:
                j = len(states)
                if j >= state_bound:
                    raise StateBoundExceeded(j + 1, state_bound)
                index[m2] = j
                states.append(m2)
                queue.append(j)
            edges.append((k, c.transitions[ti], j))
    return ReachabilityGraph(c.places, states, edges, dict(wf.net.labels), index.get(c.final))


def is_safe(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> bool:
    """True iff every marking reachable from ``[i]`` is a set."""
    c = _Compiled(wf)
    seen = {c.initial}
    queue = deque([c.initial])
    while queue:
        m = queue.popleft()
        for ti in c.enabled(m):
            m2 = c.fire(m, ti)
            if m2 in seen:
                continue
            if any(x > 1 for x in m2):
                return False
            if len(seen) >= state_bound:
                raise StateBoundExceeded(len(seen) + 1, state_bound)
            seen.add(m2)
            queue.append(m2)
    return True


@dataclass(frozen=True)
class SoundnessReport:
    option_to_complete: bool
    proper_completion: bool
    dead_transitions: tuple[str, ...]
    states: int

    @property
    def sound(self) -> bool:
        return self.option_to_complete and self.proper_completion and not self.dead_transitions


def soundness(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> SoundnessReport:
    rg = reachability_graph(wf, state_bound)
    fi = wf.net.places.index(wf.final)
    proper = all(m == rg.states[rg.final_state] for m in rg.states if m[fi]) \
        if rg.final_state is not None else not any(m[fi] for m in rg.states)
    if rg.final_state is None:
        option = False
    else:
        back: list[list[int]] = [[] for _ in rg.states]
        for s, _, d in rg.edges:
            back[d].append(s)
        seen = {rg.final_state}
        todo = [rg.final_state]
        while todo:
            for s in back[todo.pop()]:
                if s not in seen:
                    seen.add(s)
                    todo.append(s)
        option = len(seen) == len(rg.states)
    fired = {t for _, t, _ in rg.edges}
    dead = tuple(t for t in wf.net.transitions if t not in fired)
    return SoundnessReport(option, proper, dead, len(rg.states))


def is_sound(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> bool:
    """Option to complete, proper completion and no dead transitions."""
    return soundness(wf, state_bound).sound


class Replayer:
    """Decides whether label sequences are runs of a workflow net.

    A sequence is accepted if some occurrence sequence from ``[i]`` to
    ``[f]`` has it as its observable projection.  Replay runs on the
    reachability graph, built once, as a nondeterministic automaton with
    silent moves.
    """

    def __init__(self, wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND):
        rg = reachability_graph(wf, state_bound)
        self._silent: list[list[int]] = [[] for _ in rg.states]
        self._moves: list[dict[str, list[int]]] = [{} for _ in rg.states]
        for src, t, dst in rg.edges:
            label = rg.labels[t]
            if label is None:
                self._silent[src].append(dst)
            else:
                self._moves[src].setdefault(label, []).append(dst)
        self._final = rg.final_state
        self._start = self._closure([0])
        self._cache: dict[tuple[frozenset, str], frozenset] = {}

    def _closure(self, states: Iterable[int]) -> frozenset:
        seen = set(states)
        todo = list(seen)
        while todo:
            for d in self._silent[todo.pop()]:
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
        return frozenset(seen)

    def _step(self, current: frozenset, label: str) -> frozenset:
        key = (current, label)
        hit = self._cache.get(key)
        if hit is None:
            nxt = [d for s in current for d in self._moves[s].get(label, ())]
            hit = self._closure(nxt) if nxt else frozenset()
            self._cache[key] = hit
        return hit

    def accepts(self, labels: Sequence[str]) -> bool:
        cur = self._start
        for l in labels:
            cur = self._step(cur, l)
            if not cur:
                return False
        return self._final is not None and self._final in cur


def accepts(wf: WorkflowNet, labels: Sequence[str], state_bound: int = DEFAULT_STATE_BOUND) -> bool:
    return Replayer(wf, state_bound).accepts(labels)


def fuse_series_places(net):
    """Fusion of Series Places for silent transitions, iterated to a fixpoint.

    A silent transition ``t`` with ``pre(t) = {p}``, ``post(t) = {q}``,
    ``post(p) = {t}``, ``pre(q) = {t}`` and ``p != q`` is deleted and
    ``q`` merged into ``p``.  Accepts a :class:`LabeledNet` or a
    :class:`WorkflowNet`; for the latter the merged place keeps the
    initial/final role of its constituents.
    """
    wf = net if isinstance(net, WorkflowNet) else None
    n = _net_of(net)
    places = dict.fromkeys(n.places)
    labels = dict(n.labels)
    arcs = set(n.arcs)
    initial = wf.initial if wf else None
    final = wf.final if wf else None
    pre: dict[str, set[str]] = {x: set() for x in (*places, *labels)}
    post: dict[str, set[str]] = {x: set() for x in (*places, *labels)}
    for a, b in arcs:
        post[a].add(b)
        pre[b].add(a)

    changed = True
    while changed:
        changed = False
        for t in list(labels):
            if labels[t] is not None or len(pre[t]) != 1 or len(post[t]) != 1:
                continue
            (p,), (q,) = pre[t], post[t]
            if p == q or post[p] != {t} or pre[q] != {t}:
                continue
            # delete t, redirect q's remaining arcs onto p
            arcs.discard((p, t))
            arcs.discard((t, q))
            post[p].discard(t)
            pre[q].discard(t)
            for x in post[q]:
                arcs.discard((q, x))
                arcs.add((p, x))
                pre[x].discard(q)
                pre[x].add(p)
                post[p].add(x)
            for x in pre[q]:
                arcs.discard((x, q))
                arcs.add((x, p))
                post[x].discard(q)
                post[x].add(p)
                pre[p].add(x)
            del labels[t], places[q], pre[t], post[t], pre[q], post[q]
            if final == q:
                final = p
            if initial == q:
                initial = p
            changed = True
    result = LabeledNet(tuple(places), tuple(labels), frozenset(arcs), labels)
    if wf is None:
        return result
    return WorkflowNet(result, initial, final, check=False)


def refine_transition(host: WorkflowNet, t: str, sub: WorkflowNet) -> WorkflowNet:
    """Replace observable transition ``t`` of ``host`` by a copy of ``sub``.

    The copy's nodes are prefixed with ``"{t}/"``.  A silent enter
    transition moves tokens from the former preset of ``t`` to the copy's
    initial place; a silent exit transition moves them from its final
    place to the former postset.
    """
    hn = host.net
    if t not in hn.labels:
        raise NetError(f"transition {t!r} not in host net")
    if hn.labels[t] is None:
        raise NetError(f"transition {t!r} is silent; only observable transitions are refined")
    b = NetBuilder()
    for p in hn.places:
        b.place(p)
    for x in hn.transitions:
        if x != t:
            b.transition(x, hn.labels[x])
    for a, c in hn.arcs:
        if t not in (a, c):
            b.arc(a, c)
    prefix = f"{t}/"
    for p in sub.net.places:
        if prefix + p in b.places or prefix + p in b.transitions:
            raise NetError(f"name clash while refining {t!r}: {prefix + p}")
    b.add_net(sub.net, prefix)
    enter = b.transition(b.fresh(f"{t}:enter"))
    leave = b.transition(b.fresh(f"{t}:exit"))
    for p in hn.preset(t):
        b.arc(p, enter)
    b.arc(enter, prefix + sub.initial)
    b.arc(prefix + sub.final, leave)
    for p in hn.postset(t):
        b.arc(leave, p)
    return b.workflow(host.initial, host.final)


def rewrite_labels_to_activity(net):
    """Map ``agent|activity`` labels to ``activity``; silent stays silent."""
    n = _net_of(net)
    labels = {t: (None if l is None else split_aal(l)[1]) for t, l in n.labels.items()}
    if isinstance(net, WorkflowNet):
        return net.relabeled(labels)
    return LabeledNet(n.places, n.transitions, n.arcs, labels)


def relabel(net, mapping) -> WorkflowNet:
    """Apply ``mapping`` (callable on observable labels) to a workflow net."""
    n = _net_of(net)
    labels = {t: (None if l is None else mapping(l)) for t, l in n.labels.items()}
    return net.relabeled(labels)


def net_size(net) -> int:
    """Number of places, transitions and arcs."""
    n = _net_of(net)
    return len(n.places) + len(n.transitions) + len(n.arcs)


def check_discipline(net, discipline: LabelDiscipline, agent: str | None = None) -> bool:
    """Whether every observable label fits the label discipline."""
    labels = _net_of(net).observable_labels()
    if discipline is LabelDiscipline.PLAIN:
        return True
    if discipline is LabelDiscipline.INTERACTION:
        return all("|" not in l for l in labels)
    pairs = []
    for l in labels:
        try:
            pairs.append(split_aal(l))
        except ValueError:
            return False
    if discipline is LabelDiscipline.AGENT:
        agents = {a for a, _ in pairs}
        return len(agents) <= 1 and (agent is None or agents <= {agent})
    return True
