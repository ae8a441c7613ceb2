"""Command-line entry point: generate, discover, baseline, measure, pipeline, pareto."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .agent_types import DEFAULT_DISTANCE_THRESHOLD, identify_agent_types
from .composer import StepError, discover, verify_bundle, write_bundle
from .conformance import measure
from .events import Naming, case_log
from .inductive import discover_cm_model
from .logio import ColumnMapping, GeneratorConfig, generate_health_log, variant_frequency_filter, write_csv
from .netio import read_pnml, to_dot, to_pnml
from .petri import DEFAULT_STATE_BOUND
from .pipeline import (
    SweepConfig,
    default_am_pairs,
    default_cm_thresholds,
    default_workers,
    load_selection,
    read_results_csv,
    run_pipeline,
    write_fronts,
)


def _pairs(text: str) -> list[tuple[float, float]]:
    out = []
    for item in text.split(","):
        ff, th = item.split(":")
        out.append((float(ff), float(th)))
    return out


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _namings(text: str) -> tuple[Naming, ...]:
    return tuple(Naming.parse(x.strip()) for x in text.split(",") if x.strip())


def _add_input(p):
    p.add_argument("input", help="event log (.csv or .xes)")
    p.add_argument("--case-column", default="case")
    p.add_argument("--activity-column", default="activity")
    p.add_argument("--agent-column", default="agent")
    p.add_argument("--timestamp-column", default="timestamp")
    p.add_argument("--timestamp-format", default="iso",
                   help="'iso', 'epoch-ms' or a strptime pattern")
    p.add_argument("--vff", type=float, default=1.0, help="variant frequency filter")


def _add_typing(p):
    p.add_argument("--distance-threshold", type=float, default=DEFAULT_DISTANCE_THRESHOLD)
    p.add_argument("--no-typing", action="store_true", help="mine per agent instance")


def _mapping(args) -> ColumnMapping:
    return ColumnMapping(args.case_column, args.activity_column, args.agent_column,
                         args.timestamp_column, args.timestamp_format)


def _selection(args, typing=True):
    sel = variant_frequency_filter(load_selection(args.input, _mapping(args)), args.vff)
    if len(sel) == 0:
        raise ValueError("no events after selection")
    if typing and not args.no_typing:
        sel, _ = identify_agent_types(sel, args.distance_threshold)
    return sel


def cmd_generate(args):
    cfg = GeneratorConfig(cases=args.cases, seed=args.seed,
                          max_rework_rounds=args.max_rework_rounds,
                          rework_probability=args.rework_probability)
    text = write_csv(generate_health_log(cfg))
    if args.output:
        Path(args.output).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def cmd_discover(args):
    sel = _selection(args)
    bundle = discover(sel, ff=args.ff, th=args.th, remove_iterations=not args.keep_iterations,
                      state_bound=args.state_bound)
    report = verify_bundle(bundle, args.state_bound)
    path = write_bundle(bundle, args.out_dir, args.name, report)
    for v in report.verdicts:
        print(f"{v.name}: size={v.size} safe={v.safe} sound={v.sound}")
    print(f"manifest: {path}")
    return 0 if report.ok else 1


def cmd_baseline(args):
    sel = _selection(args, typing=not args.no_typing)
    naming = Naming.parse(args.naming)
    wf = discover_cm_model(case_log(sel, naming), naming, args.th)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.name}.pnml").write_text(to_pnml(wf, args.name))
    (out / f"{args.name}.dot").write_text(to_dot(wf, args.name))
    print(f"wrote {out / args.name}.pnml")


def cmd_measure(args):
    wf = read_pnml(Path(args.net).read_text())
    sel = _selection(args)
    q = measure(wf, case_log(sel, Naming.parse(args.naming)), args.state_bound)
    print(json.dumps(asdict(q), indent=2))


def cmd_pipeline(args):
    cfg = SweepConfig(
        vff=args.vff,
        am_pairs=_pairs(args.am_pairs) if args.am_pairs else default_am_pairs(),
        cm_thresholds=_floats(args.cm_thresholds) if args.cm_thresholds else default_cm_thresholds(),
        namings=_namings(args.namings),
        state_bound=args.state_bound,
        distance_threshold=args.distance_threshold,
        seed=args.seed,
        type_agents=not args.no_typing,
        workers=args.workers,
    )
    rows = run_pipeline(args.input, args.out_dir, cfg, _mapping(args))
    print(f"{len(rows)} result rows written to {Path(args.out_dir) / 'results.csv'}")


def cmd_pareto(args):
    for p in write_fronts(read_results_csv(args.results), args.out_dir):
        print(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agentminer", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="seeded health-surveillance log as CSV")
    p.add_argument("--cases", type=int, default=1024)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-rework-rounds", type=int, default=3)
    p.add_argument("--rework-probability", type=float, default=0.5)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discover", help="one Agent Miner run")
    _add_input(p)
    _add_typing(p)
    p.add_argument("--ff", type=float, default=1.0)
    p.add_argument("--th", type=float, default=0.0)
    p.add_argument("--keep-iterations", action="store_true",
                   help="skip removal of observable iterations from the i-net")
    p.add_argument("--state-bound", type=int, default=DEFAULT_STATE_BOUND)
    p.add_argument("--out-dir", default="am-out")
    p.add_argument("--name", default="am")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("baseline", help="one conventional-miner run")
    _add_input(p)
    _add_typing(p)
    p.add_argument("--th", type=float, default=0.0)
    p.add_argument("--naming", default="AOL")
    p.add_argument("--out-dir", default="cm-out")
    p.add_argument("--name", default="cm")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("measure", help="entropy recall and precision of a PNML net")
    _add_input(p)
    _add_typing(p)
    p.add_argument("--net", required=True)
    p.add_argument("--naming", default="AOL")
    p.add_argument("--state-bound", type=int, default=DEFAULT_STATE_BOUND)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("pipeline", help="full AM versus CM sweep")
    _add_input(p)
    _add_typing(p)
    p.add_argument("--am-pairs", help="comma list of ff:th, default 0.1:0.9,...,1.0:0.0")
    p.add_argument("--cm-thresholds", help="comma list, default 0.0,...,0.9")
    p.add_argument("--namings", default="AOL,AAL")
    p.add_argument("--state-bound", type=int, default=DEFAULT_STATE_BOUND)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=default_workers(),
                   help="worker processes (env AGENTMINER_WORKERS)")
    p.add_argument("--out-dir", default="pipeline-out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("pareto", help="Pareto fronts from a results CSV")
    p.add_argument("results")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_pareto)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except StepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.partial_artifacts:
            print(f"partial artifacts: {', '.join(exc.partial_artifacts)}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
