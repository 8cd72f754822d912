"""Declarative model of a GUI application under test.

An :class:`AppModel` describes a small reactive application precisely enough
to simulate it: windows with widgets, object fields with initial values, and
event handlers written in a tiny statement language.  The simulator
(:mod:`guiseq.simulator`) interprets the statements; this module only defines
and validates them.

The statement language is deliberately minimal — just enough to express the
behaviours that matter for event-interaction testing:

* field traffic (``set``, ``setNull``, ``read``, ``copy``) so handlers can
  depend on what earlier handlers did;
* control flow (``if`` over null/boolean/equality checks on a field);
* GUI effects (``open``, ``close``, ``enable``, ``exit``);
* persisted key-value settings (``writeSetting``, ``readSetting``) that
  survive an application restart;
* defect triggers (``deref`` crashes on a null field, ``throwArrayOob``
  crashes unconditionally — guard it with an ``if``);
* inert reads (``log``) and procedure calls (``call``).

Field names are owner-qualified strings such as ``"MainWindow.text"``; the
owner prefix groups fields the way a class would, which is also how
:func:`~guiseq.programdb.derive_program_model` reconstructs a static
read/write model from the handlers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Union

from .graphs import SCHEMA_VERSION, GuiseqError

__all__ = [
    "FieldValue",
    "Condition",
    "Statement",
    "SetField",
    "SetNull",
    "ReadField",
    "CopyField",
    "If",
    "OpenWindow",
    "CloseWindow",
    "ExitApp",
    "Call",
    "WriteSetting",
    "ReadSetting",
    "SetWidgetEnabled",
    "Deref",
    "ThrowArrayOob",
    "Log",
    "Widget",
    "WindowSpec",
    "AppModel",
    "InvalidModelError",
    "load_app_model",
    "app_model_to_json",
]

FieldValue = Union[str, bool, None]


class InvalidModelError(GuiseqError):
    """An application model failed validation."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class Condition:
    """Predicate over a single field: ``isNull``, ``isTrue``, or ``equals``."""

    kind: str
    field: str
    value: str | None = None


@dataclass(frozen=True)
class SetField:
    field: str
    value: str | bool


@dataclass(frozen=True)
class SetNull:
    field: str


@dataclass(frozen=True)
class ReadField:
    field: str


@dataclass(frozen=True)
class CopyField:
    src: str
    dst: str


@dataclass(frozen=True)
class If:
    cond: Condition
    then: tuple["Statement", ...]
    orelse: tuple["Statement", ...] = dc_field(default=())


@dataclass(frozen=True)
class OpenWindow:
    window: str


@dataclass(frozen=True)
class CloseWindow:
    window: str


@dataclass(frozen=True)
class ExitApp:
    pass


@dataclass(frozen=True)
class Call:
    method: str


@dataclass(frozen=True)
class WriteSetting:
    key: str
    field: str


@dataclass(frozen=True)
class ReadSetting:
    key: str
    field: str


@dataclass(frozen=True)
class SetWidgetEnabled:
    window: str
    widget: str
    enabled: bool


@dataclass(frozen=True)
class Deref:
    field: str


@dataclass(frozen=True)
class ThrowArrayOob:
    pass


@dataclass(frozen=True)
class Log:
    field: str


Statement = Union[
    SetField,
    SetNull,
    ReadField,
    CopyField,
    If,
    OpenWindow,
    CloseWindow,
    ExitApp,
    Call,
    WriteSetting,
    ReadSetting,
    SetWidgetEnabled,
    Deref,
    ThrowArrayOob,
    Log,
]


@dataclass(frozen=True)
class Widget:
    id: str
    event: str
    enabled: bool = True


@dataclass(frozen=True)
class WindowSpec:
    name: str
    widgets: tuple[Widget, ...]
    modal: bool = False
    main: bool = False
    window_event: str | None = None


@dataclass(frozen=True)
class AppModel:
    """A complete application description.

    ``handlers`` maps event ids to statement blocks; ``methods`` holds named
    blocks reachable via ``call``.  ``on_launch`` runs on every application
    (re)start — it is where settings written by a previous run come back to
    bite.
    """

    name: str
    windows: tuple[WindowSpec, ...]
    fields: Mapping[str, FieldValue]
    handlers: Mapping[str, tuple[Statement, ...]]
    methods: Mapping[str, tuple[Statement, ...]]
    on_launch: tuple[Statement, ...] = dc_field(default=())

    @cached_property
    def events(self) -> tuple[str, ...]:
        """All event ids in declaration order (the universal tie-break order).

        Per window: the window-level event first (if any), then widget events
        in widget order; windows in declaration order.
        """
        out: list[str] = []
        for w in self.windows:
            if w.window_event is not None:
                out.append(w.window_event)
            out.extend(widget.event for widget in w.widgets)
        return tuple(out)

    @cached_property
    def main_window(self) -> str:
        for w in self.windows:
            if w.main:
                return w.name
        raise InvalidModelError(["no main window declared"])

    @cached_property
    def window_by_name(self) -> Mapping[str, WindowSpec]:
        return {w.name: w for w in self.windows}

    @cached_property
    def event_window(self) -> Mapping[str, str]:
        """The window each event belongs to (its widget's window, or the
        declaring window for window-level events)."""
        out: dict[str, str] = {}
        for w in self.windows:
            if w.window_event is not None:
                out[w.window_event] = w.name
            for widget in w.widgets:
                out[widget.event] = w.name
        return out

    @cached_property
    def event_widget(self) -> Mapping[str, tuple[str, str]]:
        """``(window, widget)`` for widget-bound events; window events absent."""
        out: dict[str, tuple[str, str]] = {}
        for w in self.windows:
            for widget in w.widgets:
                out[widget.event] = (w.name, widget.id)
        return out

    def handler(self, event: str) -> tuple[Statement, ...]:
        try:
            return self.handlers[event]
        except KeyError:
            raise GuiseqError(f"event {event!r} has no handler") from None

    @cached_property
    def coverage_universe(self) -> tuple[frozenset[str], frozenset[str]]:
        """All statement ids and branch ids the model can ever execute.

        Statement ids name a statement by its position: ``h:<event>/<path>``
        for handler bodies, ``m:<method>/<path>`` for named methods,
        ``launch/<path>`` for the launch block.  ``<path>`` is the dotted
        index path, descending into conditionals via ``.t.``/``.e.`` — e.g.
        ``h:e3/0.t.1`` is the second statement of the then-branch of the
        conditional at position 0.  Each conditional also contributes two
        branch ids, ``<id>:then`` and ``<id>:else``.
        """
        statements: set[str] = set()
        branches: set[str] = set()

        def walk(block: Iterable[Statement], prefix: str) -> None:
            for i, stmt in enumerate(block):
                sid = f"{prefix}{i}"
                statements.add(sid)
                if isinstance(stmt, If):
                    branches.add(f"{sid}:then")
                    branches.add(f"{sid}:else")
                    walk(stmt.then, f"{sid}.t.")
                    walk(stmt.orelse, f"{sid}.e.")

        for event in self.events:
            walk(self.handlers.get(event, ()), f"h:{event}/")
        for name in self.methods:
            walk(self.methods[name], f"m:{name}/")
        walk(self.on_launch, "launch/")
        return frozenset(statements), frozenset(branches)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _walk_statements(block: Iterable[Statement]) -> Iterable[Statement]:
    for stmt in block:
        yield stmt
        if isinstance(stmt, If):
            yield from _walk_statements(stmt.then)
            yield from _walk_statements(stmt.orelse)


def validate_app_model(model: AppModel) -> list[str]:
    violations: list[str] = []
    if not model.windows:
        violations.append("model declares no windows")
    mains = [w.name for w in model.windows if w.main]
    if len(mains) != 1:
        violations.append(f"expected exactly one main window, found {len(mains)}")
    window_names: set[str] = set()
    for w in model.windows:
        if w.name in window_names:
            violations.append(f"duplicate window name {w.name!r}")
        window_names.add(w.name)
        widget_ids: set[str] = set()
        for widget in w.widgets:
            if widget.id in widget_ids:
                violations.append(f"window {w.name!r}: duplicate widget id {widget.id!r}")
            widget_ids.add(widget.id)
    events: set[str] = set()
    for e in model.events:
        if e in events:
            violations.append(f"duplicate event id {e!r}")
        events.add(e)
    for e in events:
        if e not in model.handlers:
            violations.append(f"event {e!r} has no handler")
    for h in model.handlers:
        if h not in events:
            violations.append(f"handler for unknown event {h!r}")
    for name, value in model.fields.items():
        if "." not in name:
            violations.append(f"field {name!r} is not owner-qualified (expected 'Owner.field')")
        if not (value is None or isinstance(value, (str, bool))):
            violations.append(f"field {name!r} has unsupported initial value {value!r}")

    declared_fields = set(model.fields)
    widget_pairs = {(w.name, widget.id) for w in model.windows for widget in w.widgets}

    def check_block(block: Iterable[Statement], where: str) -> None:
        for stmt in _walk_statements(block):
            fields: tuple[str, ...] = ()
            if isinstance(stmt, (SetField, SetNull, ReadField, Deref, Log)):
                fields = (stmt.field,)
            elif isinstance(stmt, CopyField):
                fields = (stmt.src, stmt.dst)
            elif isinstance(stmt, (WriteSetting, ReadSetting)):
                fields = (stmt.field,)
            elif isinstance(stmt, If):
                fields = (stmt.cond.field,)
                if stmt.cond.kind not in ("isNull", "isTrue", "equals"):
                    violations.append(f"{where}: unknown condition kind {stmt.cond.kind!r}")
            for f in fields:
                if f not in declared_fields:
                    violations.append(f"{where}: undeclared field {f!r}")
            if isinstance(stmt, (OpenWindow, CloseWindow)) and stmt.window not in window_names:
                violations.append(f"{where}: undeclared window {stmt.window!r}")
            if isinstance(stmt, SetWidgetEnabled) and (stmt.window, stmt.widget) not in widget_pairs:
                violations.append(f"{where}: unknown widget {stmt.window!r}/{stmt.widget!r}")
            if isinstance(stmt, Call) and stmt.method not in model.methods:
                violations.append(f"{where}: call to undeclared method {stmt.method!r}")

    for event, block in model.handlers.items():
        check_block(block, f"handler {event!r}")
    for name, block in model.methods.items():
        check_block(block, f"method {name!r}")
    check_block(model.on_launch, "launch block")
    return violations


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_CONDITION_KINDS = ("isNull", "isTrue", "equals")


def _parse_condition(doc: dict, where: str) -> Condition:
    kind = doc.get("kind")
    if kind not in _CONDITION_KINDS:
        raise GuiseqError(f"{where}: unknown condition kind {kind!r}")
    if kind == "equals" and not isinstance(doc.get("value"), str):
        raise GuiseqError(f"{where}: 'equals' condition needs a string value")
    return Condition(kind=kind, field=doc["field"], value=doc.get("value"))


def _parse_statement(doc: dict, where: str) -> Statement:
    op = doc.get("op")
    try:
        if op == "set":
            value = doc["value"]
            if not isinstance(value, (str, bool)):
                raise GuiseqError(f"{where}: 'set' value must be a string or boolean")
            return SetField(field=doc["field"], value=value)
        if op == "setNull":
            return SetNull(field=doc["field"])
        if op == "read":
            return ReadField(field=doc["field"])
        if op == "copy":
            return CopyField(src=doc["from"], dst=doc["to"])
        if op == "if":
            return If(
                cond=_parse_condition(doc["cond"], where),
                then=_parse_block(doc.get("then", []), where),
                orelse=_parse_block(doc.get("else", []), where),
            )
        if op == "open":
            return OpenWindow(window=doc["window"])
        if op == "close":
            return CloseWindow(window=doc["window"])
        if op == "exit":
            return ExitApp()
        if op == "call":
            return Call(method=doc["method"])
        if op == "writeSetting":
            return WriteSetting(key=doc["key"], field=doc["field"])
        if op == "readSetting":
            return ReadSetting(key=doc["key"], field=doc["field"])
        if op == "enable":
            return SetWidgetEnabled(
                window=doc["window"], widget=doc["widget"], enabled=bool(doc["enabled"])
            )
        if op == "deref":
            return Deref(field=doc["field"])
        if op == "throwArrayOob":
            return ThrowArrayOob()
        if op == "log":
            return Log(field=doc["field"])
    except KeyError as exc:
        raise GuiseqError(f"{where}: statement {op!r} missing key {exc}") from None
    raise GuiseqError(f"{where}: unknown statement op {op!r}")


def _parse_block(docs: list, where: str) -> tuple[Statement, ...]:
    return tuple(_parse_statement(d, where) for d in docs)


def load_app_model(path: Path | str) -> AppModel:
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
        windows = tuple(
            WindowSpec(
                name=w["name"],
                modal=bool(w.get("modal", False)),
                main=bool(w.get("main", False)),
                window_event=w.get("windowEvent"),
                widgets=tuple(
                    Widget(
                        id=widget["id"],
                        event=widget["event"],
                        enabled=bool(widget.get("enabled", True)),
                    )
                    for widget in w.get("widgets", [])
                ),
            )
            for w in doc.get("windows", [])
        )
        model = AppModel(
            name=doc.get("name", Path(path).stem),
            windows=windows,
            fields=dict(doc.get("fields", {})),
            handlers={
                event: _parse_block(block, f"handler {event!r}")
                for event, block in doc.get("handlers", {}).items()
            },
            methods={
                name: _parse_block(block, f"method {name!r}")
                for name, block in doc.get("methods", {}).items()
            },
            on_launch=_parse_block(doc.get("onLaunch", []), "launch block"),
        )
    except KeyError as exc:
        raise GuiseqError(f"{path}: malformed application model: missing key {exc}") from None
    violations = validate_app_model(model)
    if violations:
        raise InvalidModelError([f"{path}: {v}" for v in violations])
    return model


def _condition_to_json(cond: Condition) -> dict:
    doc: dict = {"kind": cond.kind, "field": cond.field}
    if cond.value is not None:
        doc["value"] = cond.value
    return doc


def _statement_to_json(stmt: Statement) -> dict:
    if isinstance(stmt, SetField):
        return {"op": "set", "field": stmt.field, "value": stmt.value}
    if isinstance(stmt, SetNull):
        return {"op": "setNull", "field": stmt.field}
    if isinstance(stmt, ReadField):
        return {"op": "read", "field": stmt.field}
    if isinstance(stmt, CopyField):
        return {"op": "copy", "from": stmt.src, "to": stmt.dst}
    if isinstance(stmt, If):
        doc = {
            "op": "if",
            "cond": _condition_to_json(stmt.cond),
            "then": [_statement_to_json(s) for s in stmt.then],
        }
        if stmt.orelse:
            doc["else"] = [_statement_to_json(s) for s in stmt.orelse]
        return doc
    if isinstance(stmt, OpenWindow):
        return {"op": "open", "window": stmt.window}
    if isinstance(stmt, CloseWindow):
        return {"op": "close", "window": stmt.window}
    if isinstance(stmt, ExitApp):
        return {"op": "exit"}
    if isinstance(stmt, Call):
        return {"op": "call", "method": stmt.method}
    if isinstance(stmt, WriteSetting):
        return {"op": "writeSetting", "key": stmt.key, "field": stmt.field}
    if isinstance(stmt, ReadSetting):
        return {"op": "readSetting", "key": stmt.key, "field": stmt.field}
    if isinstance(stmt, SetWidgetEnabled):
        return {
            "op": "enable",
            "window": stmt.window,
            "widget": stmt.widget,
            "enabled": stmt.enabled,
        }
    if isinstance(stmt, Deref):
        return {"op": "deref", "field": stmt.field}
    if isinstance(stmt, ThrowArrayOob):
        return {"op": "throwArrayOob"}
    if isinstance(stmt, Log):
        return {"op": "log", "field": stmt.field}
    raise GuiseqError(f"unserializable statement {stmt!r}")


def app_model_to_json(model: AppModel) -> dict:
    windows = []
    for w in model.windows:
        wdoc: dict = {
            "name": w.name,
            "modal": w.modal,
            "main": w.main,
            "widgets": [
                {"id": widget.id, "event": widget.event, "enabled": widget.enabled}
                for widget in w.widgets
            ],
        }
        if w.window_event is not None:
            wdoc["windowEvent"] = w.window_event
        windows.append(wdoc)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "name": model.name,
        "windows": windows,
        "fields": dict(model.fields),
        "onLaunch": [_statement_to_json(s) for s in model.on_launch],
        "handlers": {
            event: [_statement_to_json(s) for s in block]
            for event, block in model.handlers.items()
        },
        "methods": {
            name: [_statement_to_json(s) for s in block]
            for name, block in model.methods.items()
        },
    }
