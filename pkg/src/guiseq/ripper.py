"""GUI ripping: explore a live application and reconstruct its event-flow graph.

Ripping answers one question per event: *what does firing it do to the set of
available events?*  The answer has to come from observation, so the ripper
drives the simulated application the way a robot user would — launch, click,
note what appeared — with two policies that keep the exploration sound and
finite:

* **Each event fires exactly once, in the first context where it becomes
  available.**  A context is the event prefix that led to a state; contexts
  are explored breadth-first, so "first" means the shallowest (and, within a
  depth, the earliest-discovered) context.  Re-firing an event per context
  would be unsound here, not just wasteful: an event observed after some
  other handler flipped application state may behave differently (take the
  other branch, skip opening its dialog), and the structural record would
  mix observations from incompatible states.
* **Every firing starts from a pristine instance.**  The ripper relaunches
  the application with fresh settings and replays the context prefix before
  firing, so an observation is never contaminated by a sibling probe.

A firing that crashes is recorded (that is a finding, not a failure of the
rip) but contributes no flow edges and its resulting state is not explored.

The flow edges are derived from each firing's structural record:

* events of every window the firing opened (their enabled events at that
  moment) may execute next;
* if the firing closed any window — its own included — everything available
  in the settled state may execute next;
* if the firing's own window survived and is not blocked by a modal window
  above it, the enabled events of that window — and only that window — may
  execute next.  Other windows that merely stayed open in the background do
  not get edges: the firing did not make them available, it just failed to
  take them away.

Initial events are whatever is available right after a fresh launch.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .appmodel import AppModel
from .graphs import SCHEMA_VERSION, Efg, GuiseqError
from .simulator import (
    CrashRecord,
    GuiState,
    SettingsStore,
    available_events,
    fire_event,
    launch,
)

__all__ = [
    "WidgetDiscovery",
    "WindowDiscovery",
    "Firing",
    "GuiStructure",
    "rip",
    "build_efg_from_structure",
    "structure_to_json",
    "save_structure",
]


@dataclass(frozen=True)
class WidgetDiscovery:
    id: str
    event: str
    enabled_at_discovery: bool


@dataclass(frozen=True)
class WindowDiscovery:
    name: str
    modal: bool
    main: bool
    widgets: tuple[WidgetDiscovery, ...]
    window_event: str | None = None


@dataclass(frozen=True)
class Firing:
    """Structural record of one event firing during the rip."""

    event: str
    context: tuple[str, ...]
    crashed: bool
    crash: CrashRecord | None
    exited: bool
    own_window: str
    own_window_persists: bool
    own_window_unblocked: bool
    opened: tuple[tuple[str, tuple[str, ...]], ...]  # (window, its enabled events)
    closed_any: bool
    post_available: tuple[str, ...]
    post_enabled_own: tuple[str, ...]


@dataclass(frozen=True)
class GuiStructure:
    """Everything the rip observed: windows, launch availability, firings."""

    app: str
    windows: tuple[WindowDiscovery, ...]  # discovery order
    initials: tuple[str, ...]
    firings: tuple[Firing, ...]

    @cached_property
    def events(self) -> tuple[str, ...]:
        out: list[str] = []
        for w in self.windows:
            if w.window_event is not None:
                out.append(w.window_event)
            out.extend(widget.event for widget in w.widgets)
        return tuple(out)


def _replay(model: AppModel, context: tuple[str, ...]) -> GuiState:
    state, crash = launch(model, SettingsStore())
    if crash is not None:
        raise GuiseqError(
            f"application {model.name!r} crashed in its launch block "
            f"({crash.kind} at {crash.statement}); cannot rip"
        )
    for event in context:
        outcome = fire_event(state, event)
        if outcome.crash is not None:  # pragma: no cover - contexts are crash-free
            raise GuiseqError(f"replaying context {context!r} crashed at {event!r}")
    return state


def _enabled_events_of(model: AppModel, state: GuiState, window: str) -> tuple[str, ...]:
    spec = model.window_by_name[window]
    out: list[str] = []
    if spec.window_event is not None:
        out.append(spec.window_event)
    out.extend(
        widget.event
        for widget in spec.widgets
        if state.widget_enabled[(window, widget.id)]
    )
    return tuple(out)


def _discover(model: AppModel, state: GuiState, window: str) -> WindowDiscovery:
    spec = model.window_by_name[window]
    return WindowDiscovery(
        name=spec.name,
        modal=spec.modal,
        main=spec.main,
        window_event=spec.window_event,
        widgets=tuple(
            WidgetDiscovery(
                id=widget.id,
                event=widget.event,
                enabled_at_discovery=state.widget_enabled[(window, widget.id)],
            )
            for widget in spec.widgets
        ),
    )


def rip(model: AppModel) -> GuiStructure:
    """Explore ``model`` and return its observed structure."""
    probe, crash = launch(model, SettingsStore())
    if crash is not None:
        raise GuiseqError(
            f"application {model.name!r} crashed in its launch block "
            f"({crash.kind} at {crash.statement}); cannot rip"
        )
    discoveries: dict[str, WindowDiscovery] = {}
    for w in probe.open_windows:
        discoveries[w] = _discover(model, probe, w)
    initials = available_events(probe)

    fired: set[str] = set()
    firings: list[Firing] = []
    queue: deque[tuple[str, ...]] = deque([()])
    while queue:
        context = queue.popleft()
        base = _replay(model, context)
        for event in available_events(base):
            if event in fired:
                continue
            fired.add(event)
            state = _replay(model, context)
            pre_open = list(state.open_windows)
            outcome = fire_event(state, event)
            own = model.event_window[event]
            if outcome.crash is not None:
                firings.append(
                    Firing(
                        event=event,
                        context=context,
                        crashed=True,
                        crash=outcome.crash,
                        exited=True,
                        own_window=own,
                        own_window_persists=False,
                        own_window_unblocked=False,
                        opened=(),
                        closed_any=False,
                        post_available=(),
                        post_enabled_own=(),
                    )
                )
                continue
            post_open = list(state.open_windows)
            for w in post_open:
                if w not in discoveries:
                    discoveries[w] = _discover(model, state, w)
            own_persists = own in post_open
            firings.append(
                Firing(
                    event=event,
                    context=context,
                    crashed=False,
                    crash=None,
                    exited=outcome.exited,
                    own_window=own,
                    own_window_persists=own_persists,
                    own_window_unblocked=(
                        own_persists and not state.exited and not state.window_blocked(own)
                    ),
                    opened=tuple(
                        (w, _enabled_events_of(model, state, w))
                        for w in post_open
                        if w not in pre_open
                    ),
                    closed_any=any(w not in post_open for w in pre_open),
                    post_available=available_events(state),
                    post_enabled_own=(
                        _enabled_events_of(model, state, own) if own_persists else ()
                    ),
                )
            )
            if not state.exited:
                queue.append(context + (event,))
    return GuiStructure(
        app=model.name,
        windows=tuple(discoveries.values()),
        initials=initials,
        firings=tuple(firings),
    )


def build_efg_from_structure(structure: GuiStructure) -> Efg:
    """Turn the structural firing records into an event-flow graph."""
    edges: list[tuple[str, str]] = []
    for f in structure.firings:
        if f.crashed:
            continue
        targets: set[str] = set()
        for _window, initial_events in f.opened:
            targets.update(initial_events)
        if f.closed_any or not f.own_window_persists:
            targets.update(f.post_available)
        if f.own_window_persists and f.own_window_unblocked:
            targets.update(f.post_enabled_own)
        edges.extend((f.event, t) for t in targets)
    return Efg.of(structure.events, structure.initials, edges)


def structure_to_json(structure: GuiStructure) -> dict:
    firings = []
    for f in structure.firings:
        doc: dict = {
            "event": f.event,
            "context": list(f.context),
            "crashed": f.crashed,
            "exited": f.exited,
            "ownWindow": f.own_window,
            "ownWindowPersists": f.own_window_persists,
            "ownWindowUnblocked": f.own_window_unblocked,
            "opened": [
                {"window": w, "initialEvents": list(events)} for w, events in f.opened
            ],
            "closedAny": f.closed_any,
            "postAvailable": list(f.post_available),
            "postEnabledOwnWindow": list(f.post_enabled_own),
        }
        if f.crash is not None:
            doc["crash"] = {"kind": f.crash.kind, "statement": f.crash.statement}
        firings.append(doc)
    windows = []
    for w in structure.windows:
        wdoc: dict = {
            "name": w.name,
            "modal": w.modal,
            "main": w.main,
            "widgets": [
                {
                    "id": widget.id,
                    "event": widget.event,
                    "enabledAtDiscovery": widget.enabled_at_discovery,
                }
                for widget in w.widgets
            ],
        }
        if w.window_event is not None:
            wdoc["windowEvent"] = w.window_event
        windows.append(wdoc)
    return {
        "schemaVersion": SCHEMA_VERSION,
        "app": structure.app,
        "windows": windows,
        "initials": list(structure.initials),
        "firings": firings,
    }


def save_structure(structure: GuiStructure, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(structure_to_json(structure), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
