"""Program model: classes, fields, methods, and event-handler bindings.

This is the static-analysis side of the toolkit.  A :class:`ProgramModel`
describes what a (decompiled or source-analysed) application's handlers do to
object fields: per method, which fields it reads, which it writes, and which
other methods it calls.  Field names are qualified as ``Class.field`` so two
classes may declare the same short name without colliding.

From that model, :class:`ClassDb` answers the two queries the dependency
analysis needs — the sets of fields an event's handler *transitively* writes
and reads, following calls through the call graph (cycles included; a
visited set makes the walk terminate).  :func:`build_edg` then compares the
write set of every event with the read set of every event (self-pairs
included: a handler that reads what it wrote earlier depends on its previous
run) and emits a weighted dependency edge wherever the overlap is non-empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

from .graphs import SCHEMA_VERSION, Edg, Efg, GuiseqError

if TYPE_CHECKING:
    from .appmodel import AppModel

__all__ = [
    "ProgramMethod",
    "ProgramClass",
    "ProgramModel",
    "ClassDb",
    "UnboundEventError",
    "build_class_db",
    "build_edg",
    "derive_program_model",
    "load_program_model",
    "program_model_to_json",
]


class UnboundEventError(GuiseqError):
    """An event has no handler binding in the program model."""


@dataclass(frozen=True)
class ProgramMethod:
    name: str  # qualified, "Class.method"
    reads: tuple[str, ...]
    writes: tuple[str, ...]
    calls: tuple[str, ...]


@dataclass(frozen=True)
class ProgramClass:
    name: str
    fields: tuple[str, ...]
    methods: tuple[ProgramMethod, ...]


@dataclass(frozen=True)
class ProgramModel:
    classes: tuple[ProgramClass, ...]
    bindings: Mapping[str, str]  # event id -> qualified handler method


@dataclass(frozen=True)
class ClassDb:
    """Queryable index over a program model.

    The interesting members are :meth:`fields_written` and
    :meth:`fields_read`: the transitive closure of field effects through the
    call graph, starting from an event's bound handler.
    """

    model: ProgramModel

    @cached_property
    def methods(self) -> Mapping[str, ProgramMethod]:
        out: dict[str, ProgramMethod] = {}
        for cls in self.model.classes:
            for m in cls.methods:
                if m.name in out:
                    raise GuiseqError(f"duplicate method {m.name!r} in program model")
                out[m.name] = m
        return out

    @cached_property
    def declared_fields(self) -> frozenset[str]:
        out: set[str] = set()
        for cls in self.model.classes:
            for f in cls.fields:
                out.add(f"{cls.name}.{f}")
        return frozenset(out)

    def handler_of(self, event: str) -> str:
        try:
            return self.model.bindings[event]
        except KeyError:
            raise UnboundEventError(f"event {event!r} has no handler binding") from None

    def _closure(self, event: str, kind: str) -> frozenset[str]:
        """Fields transitively touched (read or written) by an event's handler.

        Depth-first walk over the call graph with a visited set, so mutually
        recursive methods contribute each effect exactly once and the walk
        always terminates.
        """
        root = self.handler_of(event)
        methods = self.methods
        if root not in methods:
            raise GuiseqError(f"event {event!r} is bound to unknown method {root!r}")
        acc: set[str] = set()
        visited: set[str] = set()
        stack = [root]
        while stack:
            name = stack.pop()
            if name in visited:
                continue
            visited.add(name)
            method = methods.get(name)
            if method is None:
                raise GuiseqError(f"method {name!r} calls unknown method (from {root!r})")
            acc.update(method.writes if kind == "writes" else method.reads)
            stack.extend(method.calls)
        return frozenset(acc)

    def fields_written(self, event: str) -> frozenset[str]:
        return self._closure(event, "writes")

    def fields_read(self, event: str) -> frozenset[str]:
        return self._closure(event, "reads")


def build_class_db(model: ProgramModel) -> ClassDb:
    """Index a program model, validating method references eagerly."""
    db = ClassDb(model)
    db.methods  # force duplicate detection
    for cls in model.classes:
        for m in cls.methods:
            for callee in m.calls:
                if callee not in db.methods:
                    raise GuiseqError(f"method {m.name!r} calls unknown method {callee!r}")
            for f in (*m.reads, *m.writes):
                if f not in db.declared_fields:
                    raise GuiseqError(f"method {m.name!r} references undeclared field {f!r}")
    return db


def build_edg(db: ClassDb, efg: Efg) -> tuple[Edg, list[str]]:
    """Derive the event-dependency graph for the events of a flow graph.

    Every ordered pair of events (self-pairs included) gets an edge iff the
    first event's transitive write set intersects the second's transitive
    read set; the weight is the size of that intersection.  Events without a
    handler binding contribute empty effect sets and a warning rather than an
    error — a partial program model still yields a usable (if sparser) graph.
    """
    warnings: list[str] = []
    writes: dict[str, frozenset[str]] = {}
    reads: dict[str, frozenset[str]] = {}
    for e in efg.events:
        try:
            writes[e] = db.fields_written(e)
            reads[e] = db.fields_read(e)
        except UnboundEventError:
            warnings.append(f"event {e!r} has no handler binding; dependencies unknown")
            writes[e] = frozenset()
            reads[e] = frozenset()
    edges: list[tuple[str, int, str]] = []
    for src in efg.events:
        for dst in efg.events:
            weight = len(writes[src] & reads[dst])
            if weight > 0:
                edges.append((src, weight, dst))
    return Edg.of(efg.events, edges), warnings


# ---------------------------------------------------------------------------
# Extraction from an application model
# ---------------------------------------------------------------------------


def _direct_effects(block, handlers_class: str) -> tuple[list[str], list[str], list[str]]:
    """First-seen-ordered (reads, writes, calls) of a statement block.

    Descends into conditionals but not into calls — called methods carry
    their own effects and appear in ``calls``, which is exactly what lets the
    closure queries reconstruct the transitive sets.
    """
    from . import appmodel as am

    reads: list[str] = []
    writes: list[str] = []
    calls: list[str] = []

    def note(acc: list[str], name: str) -> None:
        if name not in acc:
            acc.append(name)

    def walk(stmts) -> None:
        for stmt in stmts:
            if isinstance(stmt, (am.ReadField, am.Deref, am.Log)):
                note(reads, stmt.field)
            elif isinstance(stmt, (am.SetField, am.SetNull)):
                note(writes, stmt.field)
            elif isinstance(stmt, am.CopyField):
                note(reads, stmt.src)
                note(writes, stmt.dst)
            elif isinstance(stmt, am.WriteSetting):
                note(reads, stmt.field)
            elif isinstance(stmt, am.ReadSetting):
                note(writes, stmt.field)
            elif isinstance(stmt, am.If):
                note(reads, stmt.cond.field)
                walk(stmt.then)
                walk(stmt.orelse)
            elif isinstance(stmt, am.Call):
                note(calls, f"{handlers_class}.{stmt.method}")

    walk(block)
    return reads, writes, calls


def derive_program_model(app: "AppModel", handlers_class: str = "Handlers") -> ProgramModel:
    """Extract the field-traffic model an exact static analysis would see.

    Application fields are owner-qualified (``"MainWindow.text"``), so each
    owner prefix becomes a field-holding class; handler and method bodies
    become methods of a synthetic ``handlers_class``, carrying their direct
    reads/writes/calls.  The result is the ground-truth counterpart to a
    hand-curated analysis of the same application.
    """
    owners: dict[str, list[str]] = {}
    for name in app.fields:
        owner, field_name = name.rsplit(".", 1)
        owners.setdefault(owner, []).append(field_name)
    if handlers_class in owners:
        raise GuiseqError(
            f"field owner {handlers_class!r} collides with the handlers class name"
        )
    taken = set(app.events) & set(app.methods)
    if taken:
        raise GuiseqError(f"event ids collide with method names: {sorted(taken)}")

    methods: list[ProgramMethod] = []
    for event in app.events:
        reads, writes, calls = _direct_effects(app.handlers.get(event, ()), handlers_class)
        methods.append(
            ProgramMethod(
                name=f"{handlers_class}.{event}",
                reads=tuple(reads),
                writes=tuple(writes),
                calls=tuple(calls),
            )
        )
    for name, block in app.methods.items():
        reads, writes, calls = _direct_effects(block, handlers_class)
        methods.append(
            ProgramMethod(
                name=f"{handlers_class}.{name}",
                reads=tuple(reads),
                writes=tuple(writes),
                calls=tuple(calls),
            )
        )
    classes = tuple(
        ProgramClass(name=owner, fields=tuple(fields), methods=())
        for owner, fields in owners.items()
    ) + (ProgramClass(name=handlers_class, fields=(), methods=tuple(methods)),)
    bindings = {event: f"{handlers_class}.{event}" for event in app.events}
    return ProgramModel(classes=classes, bindings=bindings)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def program_model_to_json(model: ProgramModel) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "classes": [
            {
                "name": cls.name,
                "fields": list(cls.fields),
                "methods": [
                    {
                        "name": m.name,
                        "reads": list(m.reads),
                        "writes": list(m.writes),
                        "calls": list(m.calls),
                    }
                    for m in cls.methods
                ],
            }
            for cls in model.classes
        ],
        "bindings": dict(model.bindings),
    }


def _method_from_json(doc: dict) -> ProgramMethod:
    return ProgramMethod(
        name=doc["name"],
        reads=tuple(doc.get("reads", [])),
        writes=tuple(doc.get("writes", [])),
        calls=tuple(doc.get("calls", [])),
    )


def load_program_model(path: Path | str) -> ProgramModel:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GuiseqError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise GuiseqError(f"{path}: expected a JSON object at top level")
    version = doc.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise GuiseqError(
            f"{path}: unsupported schema version {version!r} (expected {SCHEMA_VERSION})"
        )
    try:
        classes = tuple(
            ProgramClass(
                name=c["name"],
                fields=tuple(c.get("fields", [])),
                methods=tuple(_method_from_json(m) for m in c.get("methods", [])),
            )
            for c in doc.get("classes", [])
        )
        bindings = dict(doc.get("bindings", {}))
    except (KeyError, TypeError) as exc:
        raise GuiseqError(f"{path}: malformed program model: {exc}") from None
    return ProgramModel(classes=classes, bindings=bindings)
