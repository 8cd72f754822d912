from __future__ import annotations

import json

import pytest

from guiseq.appmodel import InvalidModelError, load_app_model
from guiseq.graphs import GuiseqError
from guiseq.simulator import (
    CRASH_ARRAY_OOB,
    CRASH_NULL_DEREF,
    MAX_CALL_DEPTH,
    SettingsStore,
    available_events,
    fire_event,
    launch,
)


def write_model(tmp_path, doc):
    base = {
        "schemaVersion": 1,
        "name": "synthetic",
        "fields": {},
        "onLaunch": [],
        "methods": {},
    }
    base.update(doc)
    p = tmp_path / "app.json"
    p.write_text(json.dumps(base))
    return load_app_model(p)


def two_window_doc(**overrides):
    doc = {
        "windows": [
            {
                "name": "Main",
                "main": True,
                "modal": False,
                "widgets": [
                    {"id": "w1", "event": "open", "enabled": True},
                    {"id": "w2", "event": "quit", "enabled": True},
                ],
            },
            {
                "name": "Aux",
                "main": False,
                "modal": False,
                "widgets": [{"id": "w3", "event": "shut", "enabled": True}],
            },
        ],
        "handlers": {
            "open": [{"op": "open", "window": "Aux"}],
            "quit": [{"op": "close", "window": "Main"}],
            "shut": [{"op": "close", "window": "Aux"}],
        },
    }
    doc.update(overrides)
    return doc


def test_example_coverage_universe(example_app):
    statements, branches = example_app.coverage_universe
    assert statements == {
        "h:e1/0",
        "h:e2/0", "h:e2/1",
        "h:e3/0", "h:e3/0.t.0", "h:e3/0.e.0",
        "h:e4/0", "h:e4/1", "h:e4/2",
        "m:openDialog/0", "m:openDialog/1",
        "m:closeDialog/0",
    }
    assert branches == {"h:e3/0:then", "h:e3/0:else"}


def test_available_events_follow_declaration_order(example_app):
    state, crash = launch(example_app, SettingsStore())
    assert crash is None
    assert available_events(state) == ("e1", "e2", "e3")


def test_modal_window_blocks_everything_below(example_app):
    state, _ = launch(example_app, SettingsStore())
    assert fire_event(state, "e3").ok
    assert state.open_windows == ["MainWindow", "Dialog"]
    assert available_events(state) == ("e4",)


def test_modeless_window_blocks_nothing(jabref_app):
    state, _ = launch(jabref_app, SettingsStore())
    assert available_events(state) == ("Manage content selectors",)
    fire_event(state, "Manage content selectors")
    # the selector dialog is modeless, so main-window events stay live
    assert available_events(state) == ("Close database", "OK")


def test_reopen_and_close_missing_are_noops(tmp_path):
    doc = two_window_doc()
    doc["handlers"]["open"] = [
        {"op": "open", "window": "Aux"},
        {"op": "open", "window": "Aux"},
    ]
    doc["handlers"]["shut"] = [
        {"op": "close", "window": "Aux"},
        {"op": "close", "window": "Aux"},
    ]
    model = write_model(tmp_path, doc)
    state, _ = launch(model, SettingsStore())
    assert fire_event(state, "open").ok
    assert state.open_windows == ["Main", "Aux"]
    assert fire_event(state, "shut").ok
    assert state.open_windows == ["Main"]
    assert not state.exited


def test_closing_main_window_exits(tmp_path):
    model = write_model(tmp_path, two_window_doc())
    state, _ = launch(model, SettingsStore())
    outcome = fire_event(state, "quit")
    assert outcome.ok and outcome.exited
    assert state.exited
    assert available_events(state) == ()


def test_exit_aborts_the_running_handler(tmp_path):
    doc = two_window_doc()
    doc["fields"] = {"Main.mark": None}
    doc["handlers"]["quit"] = [
        {"op": "exit"},
        {"op": "set", "field": "Main.mark", "value": "late"},
    ]
    model = write_model(tmp_path, doc)
    state, _ = launch(model, SettingsStore())
    outcome = fire_event(state, "quit")
    assert outcome.ok and outcome.exited
    assert state.fields["Main.mark"] is None
    assert "h:quit/1" not in state.covered_statements


def test_null_dereference_crash_names_the_statement(example_app):
    state, _ = launch(example_app, SettingsStore())
    fire_event(state, "e3")
    assert fire_event(state, "e4").ok  # nulls MainWindow.text
    outcome = fire_event(state, "e2")
    assert outcome.crash is not None and outcome.exited
    assert outcome.crash.kind == CRASH_NULL_DEREF
    assert outcome.crash.statement == "h:e2/0"
    assert outcome.crash.phase == "event"
    # the crashing statement itself counts as covered, its successor does not
    assert "h:e2/0" in state.covered_statements
    assert "h:e2/1" not in state.covered_statements


def test_array_bounds_crash_in_else_branch(jabref_app):
    state, _ = launch(jabref_app, SettingsStore())
    for event in ("Manage content selectors", "Close database", "Manage content selectors"):
        assert fire_event(state, event).ok
    outcome = fire_event(state, "OK")
    assert outcome.crash is not None
    assert outcome.crash.kind == CRASH_ARRAY_OOB
    assert outcome.crash.statement == "h:OK/0.e.0"
    assert "h:OK/0:else" in state.covered_branches


def test_settings_survive_relaunch_and_coerce_booleans(tmp_path):
    doc = two_window_doc()
    doc["fields"] = {"Main.flag": True, "Main.got": "x"}
    doc["handlers"]["open"] = [
        {"op": "writeSetting", "key": "k", "field": "Main.flag"},
        {"op": "readSetting", "key": "missing", "field": "Main.got"},
    ]
    model = write_model(tmp_path, doc)
    settings = SettingsStore()
    state, _ = launch(model, settings)
    fire_event(state, "open")
    assert settings.get("k") == "true"
    assert state.fields["Main.got"] is None
    # a later launch against the same store sees what the first one wrote
    state2, _ = launch(model, settings)
    assert state2.settings.get("k") == "true"
    assert settings.as_dict() == {"k": "true"}


def test_widget_flags_survive_window_close_but_not_relaunch(tmp_path):
    doc = two_window_doc()
    doc["windows"][1]["widgets"][0]["enabled"] = False
    doc["handlers"]["open"] = [
        {"op": "open", "window": "Aux"},
        {"op": "enable", "window": "Aux", "widget": "w3", "enabled": True},
    ]
    model = write_model(tmp_path, doc)
    state, _ = launch(model, SettingsStore())
    fire_event(state, "open")
    assert "shut" in available_events(state)
    fire_event(state, "shut")  # closes Aux
    state.open_windows.append("Aux")  # a bare reopen, no handler in between
    assert "shut" in available_events(state)

    fresh, _ = launch(model, SettingsStore())
    fresh.open_windows.append("Aux")
    assert "shut" not in available_events(fresh)


def test_firing_an_unavailable_event_raises(example_app):
    state, _ = launch(example_app, SettingsStore())
    with pytest.raises(GuiseqError, match="not available"):
        fire_event(state, "e4")


def test_runaway_recursion_is_cut_off(tmp_path):
    doc = two_window_doc()
    doc["handlers"]["open"] = [{"op": "call", "method": "loop"}]
    doc["methods"] = {"loop": [{"op": "call", "method": "loop"}]}
    model = write_model(tmp_path, doc)
    state, _ = launch(model, SettingsStore())
    with pytest.raises(GuiseqError, match=f"call depth exceeded {MAX_CALL_DEPTH}"):
        fire_event(state, "open")


def test_launch_block_runs_and_can_crash(rachota_app):
    # nothing stored: the guarded branch stays cold
    state, crash = launch(rachota_app, SettingsStore())
    assert crash is None
    assert "launch/1.t.0" not in state.covered_statements

    # a count of "1" with no stored task dereferences null during startup
    poisoned = SettingsStore()
    poisoned.set("tasks.count", "1")
    state, crash = launch(rachota_app, poisoned)
    assert crash is not None
    assert crash.kind == CRASH_NULL_DEREF
    assert crash.statement == "launch/1.t.1"
    assert crash.phase == "launch"
    assert state.exited


def test_load_rejects_invalid_models(tmp_path):
    p = tmp_path / "bad.json"

    doc = {
        "schemaVersion": 1,
        "name": "bad",
        "windows": [
            {"name": "A", "main": True, "modal": False, "widgets": []},
            {"name": "B", "main": True, "modal": False, "widgets": []},
        ],
        "fields": {},
        "onLaunch": [],
        "handlers": {},
        "methods": {},
    }
    p.write_text(json.dumps(doc))
    with pytest.raises(InvalidModelError, match="exactly one main window"):
        load_app_model(p)

    doc["windows"] = [
        {
            "name": "A",
            "main": True,
            "modal": False,
            "widgets": [{"id": "w", "event": "e", "enabled": True}],
        }
    ]
    doc["handlers"] = {"e": [{"op": "frobnicate"}]}
    p.write_text(json.dumps(doc))
    with pytest.raises(GuiseqError, match="unknown statement op 'frobnicate'"):
        load_app_model(p)

    doc["handlers"] = {"e": [{"op": "set", "field": "A.ghost", "value": "x"}]}
    p.write_text(json.dumps(doc))
    with pytest.raises(InvalidModelError, match="undeclared field 'A.ghost'"):
        load_app_model(p)

    doc["handlers"] = {}
    p.write_text(json.dumps(doc))
    with pytest.raises(InvalidModelError, match="event 'e' has no handler"):
        load_app_model(p)
