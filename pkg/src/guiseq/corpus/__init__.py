"""Bundled application models and program models.

Three applications ship with the package:

* ``example-app`` — a two-window application with a guarded dialog and a
  null-dereference reachable only by running the dialog's OK before another
  handler reads the field it nulls.  It comes with two program models:
  ``example-app-curated`` (a hand-pruned analysis keeping only the
  dependencies that matter) and ``example-app-literal`` (the exact field
  traffic of the handlers, as :func:`guiseq.programdb.derive_program_model`
  would extract it).
* ``jabref-scenario`` — a reference-manager fragment: closing the database
  while its content-selector dialog stays open makes the dialog's OK throw.
* ``rachota-scenario`` — a time-tracker fragment: adding a task and saving
  settings persists a null task name that crashes the *next* launch.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..appmodel import AppModel, load_app_model
from ..programdb import ProgramModel, load_program_model

__all__ = [
    "MODELS",
    "PROGRAM_MODELS",
    "DEFAULT_IR",
    "model_path",
    "ir_path",
    "app_model",
    "program_model",
]

MODELS = ("example-app", "jabref-scenario", "rachota-scenario")
PROGRAM_MODELS = (
    "example-app-curated",
    "example-app-literal",
    "jabref-scenario",
    "rachota-scenario",
)
#: The program model each application is normally paired with.
DEFAULT_IR = {
    "example-app": "example-app-curated",
    "jabref-scenario": "jabref-scenario",
    "rachota-scenario": "rachota-scenario",
}


def _path(filename: str) -> Path:
    return Path(str(resources.files(__name__) / filename))


def model_path(name: str) -> Path:
    if name not in MODELS:
        raise KeyError(f"unknown bundled model {name!r}; have {MODELS}")
    return _path(f"{name}.app.json")


def ir_path(name: str) -> Path:
    if name not in PROGRAM_MODELS:
        raise KeyError(f"unknown bundled program model {name!r}; have {PROGRAM_MODELS}")
    return _path(f"{name}.ir.json")


def app_model(name: str) -> AppModel:
    return load_app_model(model_path(name))


def program_model(name: str) -> ProgramModel:
    return load_program_model(ir_path(name))
