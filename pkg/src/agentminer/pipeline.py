"""Evaluation sweep: select events, type agents, discover AM and CM models,
measure them, and write results and Pareto fronts."""
from __future__ import annotations

import csv
import io
import json
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .agent_types import (
    DEFAULT_DISTANCE_THRESHOLD,
    assignment_csv,
    distance_matrix_csv,
    identify_agent_types,
    instance_dfgs,
)
from .composer import StepError, discover, verify_net
from .conformance import measure
from .events import EventSelection, Naming, case_log
from .inductive import discover_cm_model
from .logio import ColumnMapping, parse_csv, parse_xes, variant_frequency_filter
from .netio import to_dot, to_pnml
from .petri import DEFAULT_STATE_BOUND, WorkflowNet, rewrite_labels_to_activity

WORKERS_ENV = "AGENTMINER_WORKERS"

RESULT_COLUMNS = ("model_id", "miner", "naming", "ff", "th", "size", "recall", "precision",
                  "ent_log", "ent_model", "ent_intersection", "safe", "sound")

AXES = (("recall", "precision"), ("size", "precision"), ("size", "recall"))
MINIMIZED = {"size"}


def default_am_pairs() -> list[tuple[float, float]]:
    return [(round(0.1 * i, 1), round(1 - 0.1 * i, 1)) for i in range(1, 11)]


def default_cm_thresholds() -> list[float]:
    return [round(0.1 * i, 1) for i in range(10)]


@dataclass
class SweepConfig:
    vff: float = 1.0
    am_pairs: list[tuple[float, float]] = field(default_factory=default_am_pairs)
    cm_thresholds: list[float] = field(default_factory=default_cm_thresholds)
    namings: tuple[Naming, ...] = (Naming.AOL, Naming.AAL)
    state_bound: int = DEFAULT_STATE_BOUND
    distance_threshold: float = DEFAULT_DISTANCE_THRESHOLD
    seed: int = 0
    type_agents: bool = True
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.vff <= 1:
            raise ValueError("vff must be in (0, 1]")
        for ff, th in self.am_pairs:
            if not 0 < ff <= 1 or not 0 <= th < 1:
                raise ValueError(f"bad AM pair ({ff}, {th})")
        for th in self.cm_thresholds:
            if not 0 <= th < 1:
                raise ValueError(f"bad CM threshold {th}")
        for n in self.namings:
            if n not in (Naming.AOL, Naming.AAL):
                raise ValueError("namings must be AOL and/or AAL")

    def echo(self) -> dict:
        d = asdict(self)
        d["namings"] = [n.value for n in self.namings]
        d["am_pairs"] = [list(p) for p in self.am_pairs]
        return d


@dataclass(frozen=True)
class ResultRow:
    model_id: str
    miner: str
    naming: str
    ff: float | None
    th: float
    size: int
    recall: float | None
    precision: float | None
    ent_log: float | None
    ent_model: float | None
    ent_intersection: float | None
    safe: bool | None
    sound: bool | None
    error: str | None = None

    def coord(self, axis: str) -> float | None:
        return getattr(self, axis)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.9f}"
    return str(v)


def results_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in RESULT_COLUMNS])
    return buf.getvalue()


def read_results_csv(path) -> list[ResultRow]:
    def num(s, kind=float):
        return None if s == "" else kind(s)

    def flag(s):
        return None if s == "" else s == "true"

    rows = []
    with open(path, newline="") as fh:
        for d in csv.DictReader(fh):
            rows.append(ResultRow(
                d["model_id"], d["miner"], d["naming"], num(d["ff"]), float(d["th"]),
                int(d["size"]), num(d["recall"]), num(d["precision"]), num(d["ent_log"]),
                num(d["ent_model"]), num(d["ent_intersection"]), flag(d["safe"]), flag(d["sound"])))
    return rows


# ---------------------------------------------------------------- Pareto

@dataclass(frozen=True)
class ParetoFront:
    axes: tuple[str, str]
    points: tuple[tuple[float, float], ...]
    ids: tuple[tuple[str, ...], ...]

    def __len__(self):
        return len(self.points)


def _orient(axes: Sequence[str]) -> tuple[int, int]:
    return tuple(-1 if a in MINIMIZED else 1 for a in axes)


def dominates(p, q, axes=("recall", "precision")) -> bool:
    """``p`` is at least as good as ``q`` on both axes and better on one."""
    s = _orient(axes)
    a = [x * k for x, k in zip(p, s)]
    b = [x * k for x, k in zip(q, s)]
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def pareto_front(points, axes: Sequence[str] = ("recall", "precision")) -> ParetoFront:
    """Nondominated points; size is minimized, recall and precision maximized.

    ``points`` is a sequence of coordinate pairs or a mapping from model
    id to pair.  Duplicates collapse into one point carrying all ids;
    points come out in lexicographic coordinate order.
    """
    axes = tuple(axes)
    if isinstance(points, Mapping):
        items = [(tuple(map(float, p)), str(k)) for k, p in points.items()]
    else:
        items = [(tuple(map(float, p)), str(k)) for k, p in enumerate(points)]
    if not items:
        raise ValueError("pareto_front needs at least one point")
    groups: dict[tuple[float, float], list[str]] = {}
    for p, k in items:
        groups.setdefault(p, []).append(k)
    uniq = sorted(groups)
    s = _orient(axes)
    # sweep: best first on axis 0, then keep points improving axis 1
    order = sorted(uniq, key=lambda p: (-s[0] * p[0], -s[1] * p[1]))
    front, best = [], None
    for p in order:
        v = s[1] * p[1]
        if best is None or v > best:
            front.append(p)
            best = v
    front.sort()
    return ParetoFront(axes, tuple(front), tuple(tuple(groups[p]) for p in front))


def front_csv(front: ParetoFront, rows_by_id: Mapping[str, ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model_id", "miner", *front.axes])
    for p, ids in zip(front.points, front.ids):
        for k in sorted(ids):
            w.writerow([k, rows_by_id[k].miner, _fmt(p[0]), _fmt(p[1])])
    return buf.getvalue()


def write_fronts(rows: Sequence[ResultRow], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_id = {r.model_id: r for r in rows}
    written = []
    for naming in sorted({r.naming for r in rows}):
        for axes in AXES:
            pts = {r.model_id: (r.coord(axes[0]), r.coord(axes[1])) for r in rows
                   if r.naming == naming and None not in (r.coord(axes[0]), r.coord(axes[1]))}
            path = out / f"pareto_{naming}_{axes[0]}_{axes[1]}.csv"
            if pts:
                path.write_text(front_csv(pareto_front(pts, axes), by_id))
            else:
                path.write_text(f"model_id,miner,{axes[0]},{axes[1]}\n")
            written.append(path)
    return written


# ---------------------------------------------------------------- sweep jobs

def _measured(model_id, miner, naming, ff, th, wf: WorkflowNet, selection, state_bound) -> ResultRow:
    verdict = verify_net(model_id, wf, state_bound)
    try:
        q = measure(wf, case_log(selection, naming), state_bound)
        vals = (q.recall, q.precision, q.ent_log, q.ent_model, q.ent_intersection)
        err = None
    except Exception as exc:  # recorded, the sweep goes on
        vals = (None,) * 5
        err = f"{type(exc).__name__}: {exc}"
    return ResultRow(model_id, miner, naming.value, ff, th, verdict.size, vals[0], vals[1],
                     vals[2], vals[3], vals[4], verdict.safe, verdict.sound, err)


def am_id(ff, th, naming) -> str:
    return f"AM_ff{ff:.2f}_th{th:.2f}_{naming.value}"


def cm_id(th, naming) -> str:
    return f"CM_th{th:.2f}_{naming.value}"


def run_am_job(selection: EventSelection, ff: float, th: float, config: SweepConfig):
    """One AM discovery, measured under every configured naming.

    Under AOL the MAS net's labels are first rewritten to activities.
    """
    bundle = discover(selection, ff=ff, th=th, state_bound=config.state_bound)
    rows, nets = [], {}
    for naming in config.namings:
        wf = bundle.mas_net if naming is Naming.AAL else rewrite_labels_to_activity(bundle.mas_net)
        mid = am_id(ff, th, naming)
        rows.append(_measured(mid, "AM", naming, ff, th, wf, selection, config.state_bound))
        nets[mid] = wf
    return rows, nets


def run_cm_job(selection: EventSelection, th: float, naming: Naming, config: SweepConfig):
    try:
        wf = discover_cm_model(case_log(selection, naming), naming, th)
    except Exception as exc:
        raise StepError("discover CM model", exc) from exc
    mid = cm_id(th, naming)
    return [_measured(mid, "CM", naming, None, th, wf, selection, config.state_bound)], {mid: wf}


def _run(job):
    kind, selection, args, config = job
    if kind == "AM":
        return run_am_job(selection, *args, config)
    return run_cm_job(selection, *args, config)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def load_selection(path, mapping: ColumnMapping = ColumnMapping(),
                   xes_keys: Mapping[str, str] | None = None) -> EventSelection:
    if str(path).lower().endswith(".xes"):
        return parse_xes(path, xes_keys)
    return parse_csv(path, mapping)


def sweep(selection: EventSelection, config: SweepConfig):
    """All AM and CM jobs; rows sorted by model id."""
    jobs = [("AM", selection, (ff, th), config) for ff, th in config.am_pairs]
    jobs += [("CM", selection, (th, n), config) for th in config.cm_thresholds for n in config.namings]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    rows, nets = [], {}
    for r, n in results:
        rows.extend(r)
        nets.update(n)
    rows.sort(key=lambda r: r.model_id)
    return rows, nets


def environment_stamp() -> dict:
    import networkx
    import numpy
    import scipy
    from importlib import metadata
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {"python": sys.version.split()[0], "platform": platform.platform(),
            "numpy": numpy.__version__, "scipy": scipy.__version__,
            "networkx": networkx.__version__, "artifact": version}


def run_pipeline(input_path, out_dir, config: SweepConfig = None,
                 mapping: ColumnMapping = ColumnMapping()) -> list[ResultRow]:
    """Full evaluation; writes results.csv, Pareto CSVs, models and manifest.json."""
    config = config or SweepConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    try:
        try:
            raw = load_selection(input_path, mapping)
        except Exception as exc:
            raise StepError("select events", exc) from exc
        selection = variant_frequency_filter(raw, config.vff)
        if len(selection) == 0:
            raise StepError("select events", ValueError("no events after selection"))
        assignment = None
        if config.type_agents:
            try:
                selection, assignment = identify_agent_types(selection, config.distance_threshold)
            except Exception as exc:
                raise StepError("identify agent types", exc) from exc
        if assignment is not None:
            (out / "agent_types.csv").write_text(assignment_csv(assignment))
            (out / "agent_distances.csv").write_text(
                distance_matrix_csv(instance_dfgs(variant_frequency_filter(raw, config.vff))))
            written += ["agent_types.csv", "agent_distances.csv"]
        rows, nets = sweep(selection, config)
        models = out / "models"
        models.mkdir(exist_ok=True)
        for mid in sorted(nets):
            (models / f"{mid}.pnml").write_text(to_pnml(nets[mid], mid))
            (models / f"{mid}.dot").write_text(to_dot(nets[mid], mid))
        written.append("models/")
        (out / "results.csv").write_text(results_csv(rows))
        written.append("results.csv")
        written += [p.name for p in write_fronts(rows, out)]
        manifest = {
            "input": str(input_path),
            "config": config.echo(),
            "mapping": asdict(mapping),
            "events": len(selection),
            "cases": len(selection.cases()),
            "agents": selection.agents(),
            "errors": {r.model_id: r.error for r in rows if r.error},
            "environment": environment_stamp(),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return rows
    except StepError as exc:
        exc.partial_artifacts = list(written)
        raise
