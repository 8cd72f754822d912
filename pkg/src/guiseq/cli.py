"""Command-line front end.

Subcommands mirror the pipeline stages: ``rip`` an application model into an
event-flow graph, build the ``edg`` from a program model, ``gen`` sequences,
``replay`` them, compare ``report`` files, and ``export-dot`` either graph.

Exit codes: 0 on success, 1 when a replay found failing (or, without
``--allow-broken``, broken) test cases, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .appmodel import load_app_model
from .generate import (
    GenConfig,
    PRESETS,
    generate_sequences,
    load_sequences,
    save_sequences,
)
from .graphs import Edg, Efg, GuiseqError, export_dot, load_graph, save_graph
from .programdb import build_class_db, build_edg, load_program_model
from .replay import (
    group_test_cases,
    load_report,
    render_report_table,
    report_to_json,
    run_suite,
    save_report,
)
from .ripper import build_efg_from_structure, rip, save_structure

__all__ = ["RunManifest", "main", "entrypoint"]


@dataclass(frozen=True)
class RunManifest:
    """Fully resolved options for one command invocation."""

    command: str
    model: Path | None = None
    efg: Path | None = None
    edg: Path | None = None
    ir: Path | None = None
    sequences: Path | None = None
    out: Path | None = None
    report: Path | None = None
    structure: Path | None = None
    dot: Path | None = None
    graph: Path | None = None
    mode: str | None = None
    length: int | None = None
    top: int | None = None
    parallel: int = 1
    allow_broken: bool = False
    reports: tuple[Path, ...] = ()
    labels: tuple[str, ...] = ()
    gen_seconds: tuple[float, ...] = ()
    exec_seconds: tuple[float, ...] = ()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guiseq",
        description="Grey-box GUI test-sequence generation and replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rip", help="explore an application model into an event-flow graph")
    p.add_argument("--model", required=True, type=Path, help="application model (JSON)")
    p.add_argument("--out", required=True, type=Path, help="event-flow graph output (JSON)")
    p.add_argument("--structure", type=Path, help="also write the observed GUI structure")
    p.add_argument("--dot", type=Path, help="also write the graph in DOT form")

    p = sub.add_parser("edg", help="build the event-dependency graph from a program model")
    p.add_argument("--ir", required=True, type=Path, help="program model (JSON)")
    p.add_argument("--efg", required=True, type=Path, help="event-flow graph (JSON)")
    p.add_argument("--out", required=True, type=Path, help="event-dependency graph output (JSON)")
    p.add_argument("--dot", type=Path, help="also write the graph in DOT form")

    p = sub.add_parser("gen", help="generate executable test sequences")
    p.add_argument("--config", choices=sorted(PRESETS), help="preset configuration")
    p.add_argument("--mode", choices=["blackbox", "greybox"], help="generator mode")
    p.add_argument("--length", type=int, help="events per generated sequence")
    p.add_argument("--top", type=int, help="per-event sequence budget (grey-box)")
    p.add_argument("--efg", required=True, type=Path, help="event-flow graph (JSON)")
    p.add_argument("--edg", type=Path, help="event-dependency graph (grey-box only)")
    p.add_argument("--out", required=True, type=Path, help="sequence output (JSON lines)")

    p = sub.add_parser("replay", help="execute generated sequences against a model")
    p.add_argument("--model", required=True, type=Path, help="application model (JSON)")
    p.add_argument("--sequences", required=True, type=Path, help="sequence file (JSON lines)")
    p.add_argument("--report", required=True, type=Path, help="report output (JSON)")
    p.add_argument("--parallel", type=int, default=1, help="worker threads (default 1)")
    p.add_argument(
        "--allow-broken",
        action="store_true",
        help="broken sequences do not fail the run",
    )

    p = sub.add_parser("report", help="tabulate one or more replay reports")
    p.add_argument("reports", nargs="+", type=Path, help="report files (JSON)")
    p.add_argument("--label", action="append", default=[], help="column label (repeatable)")
    p.add_argument(
        "--gen-seconds",
        action="append",
        default=[],
        type=float,
        help="measured generation time per column (repeatable)",
    )
    p.add_argument(
        "--exec-seconds",
        action="append",
        default=[],
        type=float,
        help="measured execution time per column (repeatable)",
    )

    p = sub.add_parser("export-dot", help="render a graph file as DOT")
    p.add_argument("--graph", required=True, type=Path, help="graph file (JSON)")
    p.add_argument("--out", type=Path, help="output path (stdout when omitted)")

    return parser


def _manifest(args: argparse.Namespace) -> RunManifest:
    fields = {
        name: getattr(args, name)
        for name in (
            "model",
            "efg",
            "edg",
            "ir",
            "sequences",
            "out",
            "report",
            "structure",
            "dot",
            "graph",
            "parallel",
            "allow_broken",
        )
        if hasattr(args, name)
    }
    if args.command == "gen":
        base = PRESETS[args.config] if args.config else None
        mode = args.mode or (base.mode if base else None)
        length = args.length if args.length is not None else (base.length if base else None)
        top = args.top if args.top is not None else (base.top if base else None)
        if mode is None or length is None:
            raise GuiseqError("gen needs --config, or --mode and --length")
        fields.update(mode=mode, length=length, top=top)
    if args.command == "report":
        fields.update(
            reports=tuple(args.reports),
            labels=tuple(args.label),
            gen_seconds=tuple(args.gen_seconds),
            exec_seconds=tuple(args.exec_seconds),
        )
    return RunManifest(command=args.command, **fields)


def _load_efg(path: Path) -> Efg:
    g = load_graph(path)
    if not isinstance(g, Efg):
        raise GuiseqError(f"{path}: expected an event-flow graph (with initial events)")
    return g


def _load_edg(path: Path) -> Edg:
    g = load_graph(path)
    if not isinstance(g, Edg):
        raise GuiseqError(f"{path}: expected an event-dependency graph (weighted edges)")
    return g


def _cmd_rip(m: RunManifest) -> int:
    model = load_app_model(m.model)
    structure = rip(model)
    efg = build_efg_from_structure(structure)
    save_graph(efg, m.out)
    if m.structure is not None:
        save_structure(structure, m.structure)
    if m.dot is not None:
        m.dot.write_text(export_dot(efg), encoding="utf-8")
    print(
        f"ripped {model.name}: {len(efg.events)} events, "
        f"{len(efg.initials)} initial, {len(efg.edges)} edges -> {m.out}"
    )
    return 0


def _cmd_edg(m: RunManifest) -> int:
    db = build_class_db(load_program_model(m.ir))
    efg = _load_efg(m.efg)
    edg, warnings = build_edg(db, efg)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    save_graph(edg, m.out)
    if m.dot is not None:
        m.dot.write_text(export_dot(edg), encoding="utf-8")
    print(f"built dependency graph: {len(edg.edges)} edges -> {m.out}")
    return 0


def _cmd_gen(m: RunManifest) -> int:
    efg = _load_efg(m.efg)
    edg = None
    if m.mode == "greybox":
        if m.edg is None:
            raise GuiseqError("grey-box generation needs --edg")
        edg = _load_edg(m.edg)
    config = GenConfig(name="cli", mode=m.mode, length=m.length, top=m.top)
    result = generate_sequences(config, efg, edg)
    for d in result.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    save_sequences(result.records, m.out)
    print(f"generated {len(result.records)} sequences -> {m.out}")
    return 0


def _cmd_replay(m: RunManifest) -> int:
    model = load_app_model(m.model)
    cases = group_test_cases(load_sequences(m.sequences))
    suite = run_suite(model, cases, parallelism=m.parallel)
    save_report(suite, m.report)
    summary = report_to_json(suite)["summary"]
    print(
        f"replayed {summary['total']} test cases: {summary['passed']} passed, "
        f"{summary['failed']} failed, {summary['broken']} broken; "
        f"statement coverage {summary['statementCoverage']:.4f}, "
        f"branch coverage {summary['branchCoverage']:.4f}"
    )
    if summary["failed"] > 0:
        return 1
    if summary["broken"] > 0 and not m.allow_broken:
        return 1
    return 0


def _cmd_report(m: RunManifest) -> int:
    docs = [load_report(p) for p in m.reports]
    labels = list(m.labels) + [p.stem for p in m.reports[len(m.labels) :]]
    if len(labels) != len(docs):
        raise GuiseqError("more labels than report files")
    times = list(m.gen_seconds) + [None] * (len(docs) - len(m.gen_seconds))
    etimes = list(m.exec_seconds) + [None] * (len(docs) - len(m.exec_seconds))
    if len(times) != len(docs) or len(etimes) != len(docs):
        raise GuiseqError("more timing values than report files")
    print(render_report_table(list(zip(labels, docs)), times, etimes), end="")
    return 0


def _cmd_export_dot(m: RunManifest) -> int:
    dot = export_dot(load_graph(m.graph))
    if m.out is None:
        print(dot, end="")
    else:
        m.out.write_text(dot, encoding="utf-8")
    return 0


_COMMANDS = {
    "rip": _cmd_rip,
    "edg": _cmd_edg,
    "gen": _cmd_gen,
    "replay": _cmd_replay,
    "report": _cmd_report,
    "export-dot": _cmd_export_dot,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        manifest = _manifest(args)
        return _COMMANDS[manifest.command](manifest)
    except (GuiseqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
