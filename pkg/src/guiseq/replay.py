"""Sequence replay: execute generated sequences against an application model.

Each test case walks five steps: select the sequence (grouping split parts
back into one case), prepare a pristine environment (fresh settings store —
nothing leaks between cases), execute the events, restart the application
once after a clean run to let launch-time code meet whatever the sequence
persisted, and classify the outcome:

* **failed** — a crash, either while firing an event, in the launch block of
  one of the case's launches, or in the post-sequence restart;
* **broken** — some event was not available when its turn came, so the
  sequence does not describe a feasible interaction (flow-graph
  over-approximation caught in the act); the case stops there, but the
  prefix that did execute still counts toward coverage;
* **passed** — everything ran and the restart came up clean.

Split parts run back to back within one case — every part gets a fresh GUI
launch, while the settings store carries over — and event positions in
verdicts are cumulative across parts.  Coverage is the union over all
launches and firings of all cases, reported as statement and branch
fractions of the model's coverage universe, rounded to four decimals.

Cases are independent (own settings store, own GUI instances), which is what
makes parallel replay safe: a thread pool only reorders the computation,
never the results.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .appmodel import AppModel
from .generate import SequenceRecord
from .graphs import SCHEMA_VERSION, GuiseqError
from .simulator import (
    CrashRecord,
    SettingsStore,
    available_events,
    fire_event,
    launch,
)

__all__ = [
    "TestCase",
    "CaseResult",
    "SuiteResult",
    "group_test_cases",
    "run_test_case",
    "run_suite",
    "report_to_json",
    "save_report",
    "load_report",
    "render_report_table",
]


@dataclass(frozen=True)
class TestCase:
    """One replayable unit: a sequence record plus any later split parts."""

    parts: tuple[SequenceRecord, ...]

    @property
    def id(self) -> str:
        return self.parts[0].id

    @property
    def events(self) -> tuple[str, ...]:
        """All events across parts, in execution order."""
        return tuple(e for part in self.parts for e in part.events)

    @property
    def targets(self) -> tuple[int, ...]:
        """Target positions rebased onto the cumulative event list."""
        out: list[int] = []
        offset = 0
        for part in self.parts:
            out.extend(offset + t for t in part.targets)
            offset += len(part.events)
        return tuple(out)


def group_test_cases(records: Sequence[SequenceRecord]) -> list[TestCase]:
    """Regroup a record stream into test cases, attaching split parts to
    their first part."""
    groups: dict[str, list[SequenceRecord]] = {}
    order: list[str] = []
    for record in records:
        if record.split_of is None:
            if record.id in groups:
                raise GuiseqError(f"duplicate sequence id {record.id!r}")
            groups[record.id] = [record]
            order.append(record.id)
        else:
            if record.split_of not in groups:
                raise GuiseqError(
                    f"sequence {record.id!r} continues unknown sequence {record.split_of!r}"
                )
            groups[record.split_of].append(record)
    return [TestCase(parts=tuple(groups[i])) for i in order]


@dataclass(frozen=True)
class CaseResult:
    case: TestCase
    verdict: str  # "passed" | "failed" | "broken"
    crash: CrashRecord | None = None
    broken_at: int | None = None
    covered_statements: frozenset[str] = frozenset()
    covered_branches: frozenset[str] = frozenset()
    entered_handlers: frozenset[str] = frozenset()


def run_test_case(model: AppModel, case: TestCase) -> CaseResult:
    settings = SettingsStore()
    statements: set[str] = set()
    branches: set[str] = set()
    handlers: set[str] = set()

    def absorb(state) -> None:
        statements.update(state.covered_statements)
        branches.update(state.covered_branches)
        handlers.update(state.entered_handlers)

    def result(verdict: str, crash: CrashRecord | None = None, broken_at: int | None = None) -> CaseResult:
        return CaseResult(
            case=case,
            verdict=verdict,
            crash=crash,
            broken_at=broken_at,
            covered_statements=frozenset(statements),
            covered_branches=frozenset(branches),
            entered_handlers=frozenset(handlers),
        )

    offset = 0
    for part in case.parts:
        state, crash = launch(model, settings, phase="launch")
        if crash is not None:
            absorb(state)
            return result("failed", crash=crash)
        for k, event in enumerate(part.events):
            if event not in available_events(state):
                absorb(state)
                return result("broken", broken_at=offset + k)
            outcome = fire_event(state, event)
            if outcome.crash is not None:
                absorb(state)
                return result(
                    "failed",
                    crash=dataclasses.replace(outcome.crash, position=offset + k),
                )
        absorb(state)
        offset += len(part.events)
    state, crash = launch(model, settings, phase="restart")
    absorb(state)
    if crash is not None:
        return result("failed", crash=crash)
    return result("passed")


@dataclass(frozen=True)
class SuiteResult:
    model_name: str
    results: tuple[CaseResult, ...]
    statements_total: int
    branches_total: int

    @property
    def covered_statements(self) -> frozenset[str]:
        out: set[str] = set()
        for r in self.results:
            out.update(r.covered_statements)
        return frozenset(out)

    @property
    def covered_branches(self) -> frozenset[str]:
        out: set[str] = set()
        for r in self.results:
            out.update(r.covered_branches)
        return frozenset(out)

    @property
    def entered_handlers(self) -> frozenset[str]:
        out: set[str] = set()
        for r in self.results:
            out.update(r.entered_handlers)
        return frozenset(out)

    def count(self, verdict: str) -> int:
        return sum(1 for r in self.results if r.verdict == verdict)

    @property
    def statement_coverage(self) -> float:
        if self.statements_total == 0:
            return 1.0
        return round(len(self.covered_statements) / self.statements_total, 4)

    @property
    def branch_coverage(self) -> float:
        if self.branches_total == 0:
            return 1.0
        return round(len(self.covered_branches) / self.branches_total, 4)


def run_suite(
    model: AppModel, cases: Sequence[TestCase], parallelism: int = 1
) -> SuiteResult:
    """Replay all cases.  ``parallelism`` > 1 uses a thread pool; results
    come back in case order either way, so reports do not depend on it."""
    if parallelism <= 1:
        results = [run_test_case(model, case) for case in cases]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(lambda c: run_test_case(model, c), cases))
    statements, branches = model.coverage_universe
    return SuiteResult(
        model_name=model.name,
        results=tuple(results),
        statements_total=len(statements),
        branches_total=len(branches),
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def report_to_json(suite: SuiteResult) -> dict:
    tests = []
    for r in suite.results:
        doc: dict = {
            "id": r.case.id,
            "events": list(r.case.events),
            "targets": list(r.case.targets),
            "verdict": r.verdict,
        }
        if len(r.case.parts) > 1:
            doc["parts"] = [p.id for p in r.case.parts]
        if r.crash is not None:
            doc["crash"] = {
                "kind": r.crash.kind,
                "statement": r.crash.statement,
                "phase": r.crash.phase,
                "position": r.crash.position,
            }
        if r.broken_at is not None:
            doc["brokenAt"] = r.broken_at
        tests.append(doc)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "model": suite.model_name,
        "tests": tests,
        "summary": {
            "total": len(suite.results),
            "passed": suite.count("passed"),
            "failed": suite.count("failed"),
            "broken": suite.count("broken"),
            "statementsCovered": len(suite.covered_statements),
            "statementsTotal": suite.statements_total,
            "statementCoverage": suite.statement_coverage,
            "branchesCovered": len(suite.covered_branches),
            "branchesTotal": suite.branches_total,
            "branchCoverage": suite.branch_coverage,
        },
    }


def save_report(suite: SuiteResult, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(report_to_json(suite), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_report(path: Path | str) -> dict:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GuiseqError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("schemaVersion") != SCHEMA_VERSION:
        raise GuiseqError(f"{path}: not a recognizable replay report")
    return doc


def render_report_table(
    columns: Sequence[tuple[str, dict]],
    gen_seconds: Sequence[float | None] | None = None,
    exec_seconds: Sequence[float | None] | None = None,
) -> str:
    """Side-by-side summary of replay reports.

    ``columns`` pairs a label with a report document.  Timing rows show "-"
    unless measured values are supplied — the report files themselves never
    carry wall-clock times, so repeated runs stay byte-identical.
    """
    gen_seconds = gen_seconds or [None] * len(columns)
    exec_seconds = exec_seconds or [None] * len(columns)

    def fmt_time(value: float | None) -> str:
        return "-" if value is None else f"{value:.2f}s"

    rows = [
        ("", [label for label, _ in columns]),
        ("# es", [str(doc["summary"]["total"]) for _, doc in columns]),
        ("# broken es", [str(doc["summary"]["broken"]) for _, doc in columns]),
        ("gen t", [fmt_time(v) for v in gen_seconds]),
        ("exec t", [fmt_time(v) for v in exec_seconds]),
        ("line cov.", [f"{doc['summary']['statementCoverage']:.4f}" for _, doc in columns]),
        ("branch cov.", [f"{doc['summary']['branchCoverage']:.4f}" for _, doc in columns]),
    ]
    label_width = max(len(name) for name, _ in rows)
    col_widths = [
        max(len(rows[r][1][c]) for r in range(len(rows)))
        for c in range(len(columns))
    ]
    lines = []
    for name, cells in rows:
        padded = [cell.ljust(col_widths[i]) for i, cell in enumerate(cells)]
        lines.append((name.ljust(label_width) + " | " + " | ".join(padded)).rstrip())
    return "\n".join(lines) + "\n"
