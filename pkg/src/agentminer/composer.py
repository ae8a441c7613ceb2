"""Agent Miner: discover an interaction net and agent nets, then compose a MAS net."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from .dfg import build_dfg, dfg_to_wfnet, filter_dfg
from .events import EventLog, EventSelection, Naming, case_log
from .inductive import inductive_miner
from .netio import to_dot, to_pnml
from .partition import agent_logs, agent_trace_set, interaction_log
from .petri import (
    DEFAULT_STATE_BOUND,
    NetBuilder,
    NetError,
    Replayer,
    StateBoundExceeded,
    WorkflowNet,
    fuse_series_places,
    is_safe,
    is_sound,
    net_size,
    reachability_graph,
    refine_transition,
)

Anda = Callable[[EventLog, float], WorkflowNet]
Inda = Callable[[EventLog, float], WorkflowNet]


class StepError(RuntimeError):
    """A discovery step failed; ``step`` names it."""

    def __init__(self, step: str, cause: Exception):
        self.step = step
        self.cause = cause
        self.partial_artifacts: list[str] = []
        super().__init__(f"[{step}] {type(cause).__name__}: {cause}")


class IterationRemovalError(NetError):
    pass


def dfg_anda(log: EventLog, ff: float = 1.0) -> WorkflowNet:
    """DFG-based agent net discovery with the activity frequency filter."""
    return dfg_to_wfnet(filter_dfg(build_dfg(log), ff))


def inductive_inda(log: EventLog, th: float = 0.0) -> WorkflowNet:
    return inductive_miner(log, th)


def _without_transition(wf: WorkflowNet, t: str) -> WorkflowNet:
    n = wf.net
    b = NetBuilder()
    used = {p for a, c in n.arcs if t not in (a, c) for p in (a, c)}
    for p in n.places:
        if p in used or p in (wf.initial, wf.final):
            b.place(p)
    for x in n.transitions:
        if x != t:
            b.transition(x, n.labels[x])
    for a, c in n.arcs:
        if t not in (a, c):
            b.arc(a, c)
    return b.workflow(wf.initial, wf.final)


def iteration_closers(wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> list[str]:
    """Silent transitions that let an observable label occur again with
    only silent moves in between.

    For every occurrence of an observable transition labeled ``l``, the
    markings reachable from its target by silent moves are explored; a
    silent occurrence leading from a marking where ``l`` is not enabled
    to one where it is closes an iteration of ``l``.
    """
    rg = reachability_graph(wf, state_bound)
    labels = rg.labels
    succ = rg.successors()
    enables = [{labels[t] for t, _ in out if labels[t] is not None} for out in succ]
    closers = set()
    for src, t, dst in rg.edges:
        l = labels[t]
        if l is None:
            continue
        seen = {dst}
        todo = [dst]
        while todo:
            x = todo.pop()
            for s, y in succ[x]:
                if labels[s] is not None:
                    continue
                if l in enables[y] and l not in enables[x]:
                    closers.add(s)
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return sorted(closers)


def remove_observable_iterations(
    inet: WorkflowNet,
    state_bound: int = DEFAULT_STATE_BOUND,
    keep: Callable[[WorkflowNet], bool] | None = None,
) -> WorkflowNet:
    """Delete silent transitions that close single-agent iterations.

    Closing transitions are deleted one at a time (in id order) and the
    search repeats until none is left.  A deletion is kept only if the
    result is still a safe and sound workflow net and, when given,
    ``keep`` accepts it.  Raises :class:`IterationRemovalError` when
    iterations exist but none of them can be removed.
    """
    net = inet
    rejected: set[str] = set()
    removed = 0
    while True:
        candidates = [s for s in iteration_closers(net, state_bound) if s not in rejected]
        if not candidates:
            break
        progress = False
        for s in candidates:
            try:
                cand = _without_transition(net, s)
                ok = is_safe(cand, state_bound) and is_sound(cand, state_bound)
            except (NetError, StateBoundExceeded):
                ok = False
            if ok and keep is not None:
                ok = keep(cand)
            if ok:
                net = cand
                removed += 1
                progress = True
                break
            rejected.add(s)
        if not progress:
            break
    if rejected and not removed:
        raise IterationRemovalError(
            f"cannot remove observable iterations closed by {sorted(rejected)}")
    return net


@dataclass
class DiscoveryBundle:
    interaction_net: WorkflowNet
    agent_nets: dict[str, WorkflowNet]
    mas_net: WorkflowNet
    parameters: dict = field(default_factory=dict)

    def nets(self) -> dict[str, WorkflowNet]:
        out = {"interaction": self.interaction_net}
        out.update({f"agent:{a}": n for a, n in self.agent_nets.items()})
        out["mas"] = self.mas_net
        return out


def compose_mas(inet: WorkflowNet, agent_nets: Mapping[str, WorkflowNet]) -> WorkflowNet:
    """Refine every observable i-net transition with its agent net, then fuse."""
    net = inet
    for t in sorted(inet.net.observable()):
        label = inet.net.labels[t]
        if label not in agent_nets:
            raise KeyError(f"no agent net for agent {label!r}")
        net = refine_transition(net, t, agent_nets[label])
    return fuse_series_places(net)


def discover(
    selection: EventSelection,
    anda: Anda = dfg_anda,
    inda: Inda = inductive_inda,
    ff: float = 1.0,
    th: float = 0.0,
    remove_iterations: bool = True,
    state_bound: int = DEFAULT_STATE_BOUND,
) -> DiscoveryBundle:
    """Run the six Agent Miner steps on an event selection.

    Agent values are used as given; type instances beforehand to mine
    per agent type.  Iteration removal on the i-net only keeps deletions
    under which the MAS net still replays every case trace that the
    unreduced composition replays.
    """
    if len(selection) == 0:
        raise ValueError("empty selection")
    if not 0 < ff <= 1 or not 0 <= th < 1:
        raise ValueError("ff must be in (0, 1] and th in [0, 1)")

    def step(name, fn, *args):
        try:
            return fn(*args)
        except Exception as exc:  # tag and propagate
            raise StepError(name, exc) from exc

    step("create agent trace set", agent_trace_set, selection)
    ilog = step("create interaction log", interaction_log, selection)
    inet = step("discover interaction net", inda, ilog, th)
    alogs = step("create agent logs", agent_logs, selection)
    anets = {a: step(f"discover agent net {a}", anda, log, ff) for a, log in alogs.items()}

    def compose(i):
        return step("discover MAS net", compose_mas, i, anets)

    if remove_iterations and iteration_closers(inet, state_bound):
        traces = case_log(selection, Naming.AAL).label_sequences()
        unique = sorted(set(traces))
        base = Replayer(compose(inet), state_bound)
        must = [t for t in unique if base.accepts(t)]

        def keep(candidate: WorkflowNet) -> bool:
            r = Replayer(compose(candidate), state_bound)
            return all(r.accepts(t) for t in must)

        try:
            inet = remove_observable_iterations(inet, state_bound, keep)
        except IterationRemovalError as exc:
            warnings.warn(f"keeping the i-net unchanged: {exc}", stacklevel=2)
    mas = compose(inet)
    return DiscoveryBundle(inet, anets, mas, {"ff": ff, "th": th})


@dataclass(frozen=True)
class NetVerdict:
    name: str
    safe: bool | None
    sound: bool | None
    size: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return bool(self.safe and self.sound)


@dataclass
class BundleReport:
    verdicts: list[NetVerdict]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def failing(self) -> list[str]:
        return [v.name for v in self.verdicts if not v.ok]

    def __getitem__(self, name: str) -> NetVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)


def verify_net(name: str, wf: WorkflowNet, state_bound: int = DEFAULT_STATE_BOUND) -> NetVerdict:
    try:
        safe = is_safe(wf, state_bound)
        sound = is_sound(wf, state_bound) if safe else False
        return NetVerdict(name, safe, sound, net_size(wf))
    except StateBoundExceeded as exc:
        return NetVerdict(name, None, None, net_size(wf), str(exc))


def verify_bundle(bundle: DiscoveryBundle, state_bound: int = DEFAULT_STATE_BOUND) -> BundleReport:
    """Safeness and soundness of the i-net, each agent net and the MAS net."""
    if bundle is None or not bundle.agent_nets:
        raise ValueError("empty bundle")
    return BundleReport([verify_net(n, wf, state_bound) for n, wf in bundle.nets().items()])


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def write_bundle(bundle: DiscoveryBundle, out_dir: str | Path, name: str = "am",
                 report: BundleReport | None = None) -> Path:
    """One PNML and one DOT file per net plus a JSON manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"parameters": bundle.parameters, "nets": {}}
    for key, wf in bundle.nets().items():
        stem = _slug(f"{name}-{key}")
        (out / f"{stem}.pnml").write_text(to_pnml(wf, stem))
        (out / f"{stem}.dot").write_text(to_dot(wf, stem))
        entry = {"pnml": f"{stem}.pnml", "dot": f"{stem}.dot", "size": net_size(wf)}
        if report is not None:
            v = report[key]
            entry.update(safe=v.safe, sound=v.sound, error=v.error)
        manifest["nets"][key] = entry
    path = out / f"{_slug(name)}-manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
