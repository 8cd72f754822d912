"""Deterministic interpreter for application models.

The simulator plays the role of the running application: it keeps the window
stack, widget-enabled flags, field values, and the persisted settings store,
and it executes handler statements when an event fires.  Everything is
deterministic — same model, same settings, same event sequence, same result —
which is what makes byte-identical replay reports possible.

Execution semantics worth spelling out:

* **Modality.**  A window is *blocked* while a modal window sits strictly
  above it on the stack.  Blocked windows contribute no available events.
  Opening an already-open window and closing a window that is not open are
  both no-ops; closing the main window exits the application.
* **Crashes and exits abort.**  A ``deref`` of a null field or a
  ``throwArrayOob`` stops the handler mid-flight, as does ``exit``.  The
  crashing statement still counts as executed for coverage — the program got
  there, after all.
* **Launch.**  :func:`launch` builds a fresh GUI (main window open, widget
  flags reset to their declared values, fields reset to their initial
  values) and runs the model's launch block against the *given* settings
  store.  Settings are the only state that survives a relaunch; a crash in
  the launch block is how a bad persisted value takes the application down
  on restart.
* **Coverage.**  Each executed statement records its statement id and each
  evaluated conditional records the branch taken (ids as defined by
  :meth:`~guiseq.appmodel.AppModel.coverage_universe`), accumulated on the
  state.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable

from .appmodel import (
    AppModel,
    Call,
    CloseWindow,
    Condition,
    CopyField,
    Deref,
    ExitApp,
    FieldValue,
    If,
    Log,
    OpenWindow,
    ReadField,
    ReadSetting,
    SetField,
    SetNull,
    SetWidgetEnabled,
    Statement,
    ThrowArrayOob,
    WriteSetting,
)
from .graphs import GuiseqError

__all__ = [
    "CRASH_NULL_DEREF",
    "CRASH_ARRAY_OOB",
    "MAX_CALL_DEPTH",
    "CrashRecord",
    "SettingsStore",
    "GuiState",
    "FireOutcome",
    "launch",
    "fire_event",
    "available_events",
]

CRASH_NULL_DEREF = "nullDereference"
CRASH_ARRAY_OOB = "arrayIndexOutOfBounds"

# Call chains deeper than this are model bugs (unbounded recursion), not
# simulated crashes: the simulator refuses to run them.
MAX_CALL_DEPTH = 64


@dataclass(frozen=True)
class CrashRecord:
    """An uncaught defect: what blew up, where, and in which phase.

    ``phase`` is ``"event"`` for a crash inside an event handler,
    ``"launch"`` for the launch block of an initial launch, and
    ``"restart"`` for the launch block of a post-sequence restart.
    ``position`` is the sequence position of the crashing event (only
    meaningful for the ``"event"`` phase; None otherwise).
    """

    kind: str
    statement: str
    phase: str = "event"
    position: int | None = None


class SettingsStore:
    """Persisted key-value settings: the state that survives a relaunch.

    Values are strings or None; reading a key that was never written yields
    None, indistinguishable from a stored None — exactly the ambiguity that
    makes unguarded launch-time reads dangerous.
    """

    def __init__(self) -> None:
        self._data: dict[str, str | None] = {}

    def get(self, key: str) -> str | None:
        return self._data.get(key)

    def set(self, key: str, value: str | None) -> None:
        self._data[key] = value

    def clear(self) -> None:
        self._data.clear()

    def as_dict(self) -> dict[str, str | None]:
        return dict(self._data)


@dataclass
class GuiState:
    """Mutable state of one running application instance."""

    model: AppModel
    settings: SettingsStore
    open_windows: list[str]
    widget_enabled: dict[tuple[str, str], bool]
    fields: dict[str, FieldValue]
    covered_statements: set[str] = dc_field(default_factory=set)
    covered_branches: set[str] = dc_field(default_factory=set)
    entered_handlers: set[str] = dc_field(default_factory=set)
    exited: bool = False

    def window_blocked(self, window: str) -> bool:
        """True while a modal window sits strictly above ``window``."""
        try:
            pos = self.open_windows.index(window)
        except ValueError:
            return True
        return any(
            self.model.window_by_name[w].modal for w in self.open_windows[pos + 1 :]
        )


@dataclass(frozen=True)
class FireOutcome:
    crash: CrashRecord | None
    exited: bool

    @property
    def ok(self) -> bool:
        return self.crash is None


class _CrashSignal(Exception):
    def __init__(self, kind: str, statement: str) -> None:
        super().__init__(kind)
        self.kind = kind
        self.statement = statement


class _ExitSignal(Exception):
    pass


def available_events(state: GuiState) -> tuple[str, ...]:
    """Events the user could trigger right now, in declaration order.

    An event is available when its window is open and unblocked and (for
    widget events) its widget is currently enabled.  Nothing is available
    after the application exits.
    """
    if state.exited:
        return ()
    out: list[str] = []
    open_set = set(state.open_windows)
    for w in state.model.windows:
        if w.name not in open_set or state.window_blocked(w.name):
            continue
        if w.window_event is not None:
            out.append(w.window_event)
        for widget in w.widgets:
            if state.widget_enabled[(w.name, widget.id)]:
                out.append(widget.event)
    index = {e: i for i, e in enumerate(state.model.events)}
    out.sort(key=index.__getitem__)
    return tuple(out)


def _evaluate(cond: Condition, state: GuiState) -> bool:
    value = state.fields[cond.field]
    if cond.kind == "isNull":
        return value is None
    if cond.kind == "isTrue":
        return value is True
    if cond.kind == "equals":
        return value == cond.value
    raise GuiseqError(f"unknown condition kind {cond.kind!r}")


def _close_window(state: GuiState, window: str) -> None:
    if window not in state.open_windows:
        return
    state.open_windows.remove(window)
    if window == state.model.main_window:
        state.exited = True
        raise _ExitSignal()


def _execute_block(
    state: GuiState, block: Iterable[Statement], prefix: str, depth: int
) -> None:
    if depth > MAX_CALL_DEPTH:
        raise GuiseqError(
            f"call depth exceeded {MAX_CALL_DEPTH} at {prefix!r}; "
            "the model likely has unbounded recursion"
        )
    for i, stmt in enumerate(block):
        sid = f"{prefix}{i}"
        state.covered_statements.add(sid)
        if isinstance(stmt, SetField):
            state.fields[stmt.field] = stmt.value
        elif isinstance(stmt, SetNull):
            state.fields[stmt.field] = None
        elif isinstance(stmt, (ReadField, Log)):
            state.fields[stmt.field]  # an observation, no effect
        elif isinstance(stmt, CopyField):
            state.fields[stmt.dst] = state.fields[stmt.src]
        elif isinstance(stmt, If):
            if _evaluate(stmt.cond, state):
                state.covered_branches.add(f"{sid}:then")
                _execute_block(state, stmt.then, f"{sid}.t.", depth)
            else:
                state.covered_branches.add(f"{sid}:else")
                _execute_block(state, stmt.orelse, f"{sid}.e.", depth)
        elif isinstance(stmt, OpenWindow):
            if stmt.window not in state.open_windows:
                state.open_windows.append(stmt.window)
        elif isinstance(stmt, CloseWindow):
            _close_window(state, stmt.window)
        elif isinstance(stmt, ExitApp):
            state.exited = True
            raise _ExitSignal()
        elif isinstance(stmt, Call):
            _execute_block(state, state.model.methods[stmt.method], f"m:{stmt.method}/", depth + 1)
        elif isinstance(stmt, WriteSetting):
            value = state.fields[stmt.field]
            if isinstance(value, bool):
                value = "true" if value else "false"
            state.settings.set(stmt.key, value)
        elif isinstance(stmt, ReadSetting):
            state.fields[stmt.field] = state.settings.get(stmt.key)
        elif isinstance(stmt, SetWidgetEnabled):
            state.widget_enabled[(stmt.window, stmt.widget)] = stmt.enabled
        elif isinstance(stmt, Deref):
            if state.fields[stmt.field] is None:
                raise _CrashSignal(CRASH_NULL_DEREF, sid)
        elif isinstance(stmt, ThrowArrayOob):
            raise _CrashSignal(CRASH_ARRAY_OOB, sid)
        else:  # pragma: no cover - statement parsing is exhaustive
            raise GuiseqError(f"unknown statement {stmt!r}")


def launch(
    model: AppModel, settings: SettingsStore, *, phase: str = "launch"
) -> tuple[GuiState, CrashRecord | None]:
    """Start a fresh application instance against ``settings``.

    GUI state (windows, widget flags, fields) is rebuilt from the model's
    declarations; only the settings store carries history.  Returns the state
    and the crash record if the launch block crashed (the state is then dead:
    ``exited`` is set).
    """
    state = GuiState(
        model=model,
        settings=settings,
        open_windows=[model.main_window],
        widget_enabled={
            (w.name, widget.id): widget.enabled
            for w in model.windows
            for widget in w.widgets
        },
        fields=dict(model.fields),
    )
    try:
        _execute_block(state, model.on_launch, "launch/", 0)
    except _CrashSignal as crash:
        state.exited = True
        return state, CrashRecord(kind=crash.kind, statement=crash.statement, phase=phase)
    except _ExitSignal:
        pass
    return state, None


def fire_event(state: GuiState, event: str) -> FireOutcome:
    """Trigger ``event``'s handler on a live state.

    The caller is expected to have checked availability; firing an
    unavailable event is a harness bug and raises.
    """
    if event not in available_events(state):
        raise GuiseqError(f"event {event!r} fired while not available")
    state.entered_handlers.add(event)
    try:
        _execute_block(state, state.model.handler(event), f"h:{event}/", 0)
    except _CrashSignal as crash:
        state.exited = True
        return FireOutcome(
            crash=CrashRecord(kind=crash.kind, statement=crash.statement), exited=True
        )
    except _ExitSignal:
        return FireOutcome(crash=None, exited=True)
    return FireOutcome(crash=None, exited=state.exited)
