"""Event graphs and event sequences.

Two graph flavours share an event vocabulary:

* the *event-flow graph* (EFG): a directed graph over GUI events where an edge
  ``u -> v`` means v may execute immediately after u, plus the set of *initial*
  events (executable right after application launch);
* the *event-dependency graph* (EDG): a directed graph over the same events
  where an edge ``u -(w)-> v`` means w fields written by u's handler are read
  by v's handler.  The EDG has no initial-event set.

Events are plain string ids.  Their *declaration index* — the position in the
graph's ``events`` tuple — is the universal tie-breaker: every ordering in this
package (neighbour expansion, successor ranking, output ordering) falls back to
it, which is what makes the whole pipeline deterministic.

Sequences come in two shapes: an :class:`AbstractSequence` is a path in the
EDG and may not be executable on the GUI; an :class:`ExecutableSequence` is a
path in the EFG starting at an initial event, with ``targets`` marking which
positions carry the events the sequence exists to exercise (the rest are
reaching steps inserted to make it executable).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "GuiseqError",
    "UnknownEventError",
    "InvalidGraphError",
    "Efg",
    "Edg",
    "AbstractSequence",
    "ExecutableSequence",
    "validate_efg",
    "is_executable",
    "shortest_path",
    "export_dot",
    "load_graph",
    "graph_to_json",
    "save_graph",
]


class GuiseqError(Exception):
    """Base class for all errors raised by this package."""


class UnknownEventError(GuiseqError):
    """An operation referenced an event id the graph does not declare."""


class InvalidGraphError(GuiseqError):
    """A graph failed validation where a valid graph is a precondition."""

    def __init__(self, violations: Sequence[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Efg:
    """Event-flow graph: events in declaration order, initials, unweighted edges."""

    events: tuple[str, ...]
    initials: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def of(
        cls,
        events: Iterable[str],
        initials: Iterable[str],
        edges: Iterable[tuple[str, str]],
    ) -> "Efg":
        """Build a canonical graph: edges deduplicated and sorted by declaration index."""
        ev = tuple(events)
        index = {e: i for i, e in enumerate(ev)}
        uniq = sorted(
            set(tuple(e) for e in edges),
            key=lambda e: (index.get(e[0], len(ev)), index.get(e[1], len(ev))),
        )
        return cls(events=ev, initials=tuple(initials), edges=tuple(uniq))

    @cached_property
    def decl_index(self) -> Mapping[str, int]:
        return {e: i for i, e in enumerate(self.events)}

    @cached_property
    def edge_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.edges)

    @cached_property
    def adjacency(self) -> Mapping[str, tuple[str, ...]]:
        """Successors of each event, sorted by declaration index."""
        adj: dict[str, list[str]] = {e: [] for e in self.events}
        for src, dst in self.edge_set:
            adj[src].append(dst)
        idx = self.decl_index
        return {e: tuple(sorted(targets, key=idx.__getitem__)) for e, targets in adj.items()}

    def require_event(self, event: str) -> None:
        if event not in self.decl_index:
            raise UnknownEventError(f"event {event!r} is not declared in the graph")


@dataclass(frozen=True)
class Edg:
    """Event-dependency graph: weighted edges ``(source, weight, target)``, no initials."""

    events: tuple[str, ...]
    edges: tuple[tuple[str, int, str], ...]

    @classmethod
    def of(cls, events: Iterable[str], edges: Iterable[tuple[str, int, str]]) -> "Edg":
        ev = tuple(events)
        index = {e: i for i, e in enumerate(ev)}
        declared = set(ev)
        seen_pairs: set[tuple[str, str]] = set()
        for src, weight, dst in edges:
            if src not in declared or dst not in declared:
                raise UnknownEventError(f"edge ({src!r}, {dst!r}) references an undeclared event")
            if not isinstance(weight, int) or weight < 1:
                raise InvalidGraphError([f"edge ({src!r}, {dst!r}) has non-positive weight {weight!r}"])
            if (src, dst) in seen_pairs:
                raise InvalidGraphError([f"duplicate dependency edge ({src!r}, {dst!r})"])
            seen_pairs.add((src, dst))
        ordered = sorted(edges, key=lambda e: (index[e[0]], index[e[2]]))
        return cls(events=ev, edges=tuple(ordered))

    @cached_property
    def decl_index(self) -> Mapping[str, int]:
        return {e: i for i, e in enumerate(self.events)}

    @cached_property
    def successors(self) -> Mapping[str, tuple[tuple[str, int], ...]]:
        """Successors of each event as ``(target, weight)``, best-first.

        "Best" means highest weight, ties broken by lower declaration index —
        the ranking the abstract-sequence generator walks.
        """
        succ: dict[str, list[tuple[str, int]]] = {e: [] for e in self.events}
        for src, weight, dst in self.edges:
            succ[src].append((dst, weight))
        idx = self.decl_index
        return {
            e: tuple(sorted(pairs, key=lambda p: (-p[1], idx[p[0]])))
            for e, pairs in succ.items()
        }

    def require_event(self, event: str) -> None:
        if event not in self.decl_index:
            raise UnknownEventError(f"event {event!r} is not declared in the graph")


@dataclass(frozen=True)
class AbstractSequence:
    """A path in the EDG; potentially not executable on the GUI."""

    events: tuple[str, ...]


@dataclass(frozen=True)
class ExecutableSequence:
    """A path in the EFG starting at an initial event.

    ``targets`` are the positions of the events the sequence was generated
    for; all other positions are reaching steps.
    """

    events: tuple[str, ...]
    targets: tuple[int, ...] = field(default=())


def validate_efg(g: Efg) -> list[str]:
    """Structural checks on an event-flow graph.

    Returns a list of human-readable violations (empty when the graph is
    well-formed); validation reports rather than raises so callers can decide
    whether a violation is fatal.
    """
    violations: list[str] = []
    seen: set[str] = set()
    for e in g.events:
        if e in seen:
            violations.append(f"duplicate event id {e!r}")
        seen.add(e)
    declared = set(g.events)
    for i in g.initials:
        if i not in declared:
            violations.append(f"initial event {i!r} is not declared")
    if g.events and not g.initials:
        violations.append("graph declares events but no initial events")
    seen_edges: set[tuple[str, str]] = set()
    for src, dst in g.edges:
        if src not in declared:
            violations.append(f"edge source {src!r} is not declared")
        if dst not in declared:
            violations.append(f"edge target {dst!r} is not declared")
        if (src, dst) in seen_edges:
            violations.append(f"duplicate edge ({src!r}, {dst!r})")
        seen_edges.add((src, dst))
    return violations


def require_valid_efg(g: Efg) -> None:
    violations = validate_efg(g)
    if violations:
        raise InvalidGraphError(violations)


def is_executable(g: Efg, events: Sequence[str]) -> bool:
    """True iff ``events`` is a non-empty EFG path starting at an initial event."""
    for e in events:
        g.require_event(e)
    if not events:
        return False
    if events[0] not in set(g.initials):
        return False
    return all((a, b) in g.edge_set for a, b in zip(events, events[1:]))


def shortest_path(
    g: Efg,
    from_event: str,
    to_event: str,
    *,
    strict: bool = False,
) -> list[str] | None:
    """Minimum-hop connection from ``from_event`` to ``to_event``.

    Returns the events *after* ``from_event`` up to and including
    ``to_event`` — the start is excluded so concatenating hops never
    duplicates the junction event.  ``from_event == to_event`` yields ``[]``
    unless ``strict`` is set, in which case the result is a minimum-hop cycle
    of length >= 1 (a self-loop gives ``[to_event]``).  Unreachable targets
    yield ``None``.  Ties between equal-length paths are broken by expanding
    neighbours in declaration order, so the result is deterministic.
    """
    g.require_event(from_event)
    g.require_event(to_event)
    if from_event == to_event and not strict:
        return []
    adjacency = g.adjacency
    # BFS seeded with the successors of the start; parent pointers rebuild the
    # path.  Seeding (rather than starting at from_event) makes the strict
    # cycle case fall out naturally: the start may reappear as a target.
    parents: dict[str, str | None] = {}
    queue: deque[str] = deque()
    for first in adjacency[from_event]:
        if first == to_event:
            return [to_event]
        if first not in parents:
            parents[first] = None
            queue.append(first)
    while queue:
        node = queue.popleft()
        for nxt in adjacency[node]:
            if nxt == to_event:
                path = [to_event, node]
                cursor: str | None = parents[node]
                while cursor is not None:
                    path.append(cursor)
                    cursor = parents[cursor]
                path.reverse()
                return path
            if nxt not in parents:
                parents[nxt] = node
                queue.append(nxt)
    return None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def graph_to_json(g: Efg | Edg) -> dict:
    """JSON document for either graph flavour.

    The flow graph carries ``initials`` and weightless edges; the dependency
    graph omits ``initials`` and weights every edge.  The presence of the
    ``initials`` key is what tells the two apart on load.
    """
    doc: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "events": [{"id": e} for e in g.events],
    }
    if isinstance(g, Efg):
        doc["initials"] = list(g.initials)
        doc["edges"] = [{"from": src, "to": dst} for src, dst in g.edges]
    else:
        doc["edges"] = [
            {"from": src, "to": dst, "weight": weight} for src, weight, dst in g.edges
        ]
    return doc


def _check_schema(doc: dict, path: Path | str) -> None:
    version = doc.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise GuiseqError(
            f"{path}: unsupported schema version {version!r} (expected {SCHEMA_VERSION})"
        )


def load_graph(path: Path | str) -> Efg | Edg:
    """Load a graph file, inferring its flavour from the ``initials`` key."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GuiseqError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise GuiseqError(f"{path}: expected a JSON object at top level")
    _check_schema(doc, path)
    events = [entry["id"] for entry in doc.get("events", [])]
    edges = doc.get("edges", [])
    if "initials" in doc:
        g = Efg(
            events=tuple(events),
            initials=tuple(doc["initials"]),
            edges=tuple((e["from"], e["to"]) for e in edges),
        )
        violations = validate_efg(g)
        if violations:
            raise GuiseqError(f"{path}: " + "; ".join(violations))
        return g
    try:
        return Edg.of(events, [(e["from"], e["weight"], e["to"]) for e in edges])
    except KeyError as exc:
        raise GuiseqError(f"{path}: dependency edge missing key {exc}") from None
    except GuiseqError as exc:
        raise GuiseqError(f"{path}: {exc}") from None


def save_graph(g: Efg | Edg, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(graph_to_json(g), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def export_dot(g: Efg | Edg) -> str:
    """Graphviz rendering; initial events get a double border.

    The output is fully ordered (nodes then edges, both by declaration index)
    so repeated exports are byte-identical.
    """
    lines: list[str] = []
    if isinstance(g, Efg):
        lines.append("digraph efg {")
        initial = set(g.initials)
        for e in g.events:
            attrs = ' [peripheries=2]' if e in initial else ""
            lines.append(f'  "{e}"{attrs};')
        for src, dst in g.edges:
            lines.append(f'  "{src}" -> "{dst}";')
    else:
        lines.append("digraph edg {")
        for e in g.events:
            lines.append(f'  "{e}";')
        for src, weight, dst in g.edges:
            lines.append(f'  "{src}" -> "{dst}" [label="{weight}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
