"""Test-sequence generation.

Two generators share one output shape (executable sequences over the flow
graph) but differ in what drives them:

* the **black-box** generator enumerates every flow-graph path of exactly
  ``length`` events — systematic, oblivious to code, and exponential in
  ``length``;
* the **grey-box** generator walks the *dependency* graph instead: it first
  builds abstract sequences — dependency-graph paths biased toward heavy
  edges — and then repairs them into executable sequences by splicing in
  flow-graph connections.  The bet is that events whose handlers touch the
  same fields are the ones worth executing together.

Abstract-sequence construction (:func:`gen_abstract`) is an ordered
depth-first search per start event: successors are tried best-first (highest
edge weight, then earliest declaration), a path is complete when it reaches
``length`` events or a dead end, and search continues past duplicates until
``top`` complete paths are collected for that start (``top=None`` collects
every maximal path).  A start event with no outgoing dependencies still
yields its singleton sequence — the event deserves a test even if nothing
depends on it.

Making an abstract sequence executable (:func:`to_executable`) works in two
moves.  First pick the cheapest entry: the initial event with the shortest
flow-graph connection to the abstract head (ties to the earliest-declared
initial).  Then stitch consecutive abstract events together with shortest
flow-graph connections; a repeated event needs a genuine cycle, not an empty
hop, so the connection is searched in strict mode.  When some hop simply has
no flow-graph connection the sequence is *split*: the part built so far is
emitted, and the remainder restarts from a fresh entry point, linked to the
first part via ``split_of``.  The replayer runs the parts back to back in one
test case.  ``targets`` always marks where the abstract events landed in the
executable result; everything else is reaching filler.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .graphs import (
    SCHEMA_VERSION,
    AbstractSequence,
    Edg,
    Efg,
    GuiseqError,
    shortest_path,
)

__all__ = [
    "GenConfig",
    "PRESETS",
    "SequenceRecord",
    "GenerationResult",
    "gen_blackbox",
    "gen_abstract",
    "to_executable",
    "generate_sequences",
    "save_sequences",
    "load_sequences",
]


@dataclass(frozen=True)
class GenConfig:
    """A named generator configuration.

    ``top`` bounds how many abstract sequences each start event contributes
    (grey-box only); None means unbounded.
    """

    name: str
    mode: str  # "blackbox" | "greybox"
    length: int
    top: int | None = None


#: The benchmark configurations: black-box at lengths 1-3, grey-box at
#: length 2 unbounded and length 3 with per-event caps.
PRESETS: dict[str, GenConfig] = {
    "A": GenConfig("A", "blackbox", 1),
    "B": GenConfig("B", "blackbox", 2),
    "C": GenConfig("C", "blackbox", 3),
    "D": GenConfig("D", "greybox", 2, top=None),
    "E": GenConfig("E", "greybox", 3, top=50),
    "F": GenConfig("F", "greybox", 3, top=100),
}


@dataclass(frozen=True)
class SequenceRecord:
    """One executable sequence as written to a sequence file.

    ``targets`` are the positions of the events the sequence was generated
    for.  Grey-box records carry the originating abstract sequence; parts of
    a split conversion all carry the full abstract and, except for the first
    part, a ``split_of`` link to the first part's id.
    """

    id: str
    events: tuple[str, ...]
    targets: tuple[int, ...]
    origin: str  # "blackbox" | "greybox"
    abstract: tuple[str, ...] | None = None
    split_of: str | None = None


@dataclass(frozen=True)
class GenerationResult:
    records: tuple[SequenceRecord, ...]
    diagnostics: tuple[str, ...]


# ---------------------------------------------------------------------------
# Black-box generation
# ---------------------------------------------------------------------------


def _paths_of_length(g: Efg, head: str, length: int) -> Iterator[tuple[str, ...]]:
    """All flow-graph paths of exactly ``length`` events starting at ``head``,
    in lexicographic declaration order (nodes may repeat; these are walks)."""
    adjacency = g.adjacency

    def extend(path: list[str]) -> Iterator[tuple[str, ...]]:
        if len(path) == length:
            yield tuple(path)
            return
        for nxt in adjacency[path[-1]]:
            path.append(nxt)
            yield from extend(path)
            path.pop()

    yield from extend([head])


def _reachable_from_initials(g: Efg) -> frozenset[str]:
    seen = set(g.initials)
    stack = list(g.initials)
    while stack:
        node = stack.pop()
        for nxt in g.adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def _best_entry(g: Efg, head: str) -> tuple[str, list[str]] | None:
    """The initial event with the shortest connection to ``head``.

    Returns ``(initial, connection)`` where the connection excludes the
    initial and ends with ``head`` (empty when ``head`` is itself initial,
    which always wins with distance zero).  Ties go to the earliest-declared
    initial.  None when no initial reaches ``head``.
    """
    idx = g.decl_index
    best: tuple[int, int, str, list[str]] | None = None
    for initial in g.initials:
        connection = shortest_path(g, initial, head)
        if connection is None:
            continue
        key = (len(connection), idx[initial])
        if best is None or key < best[:2]:
            best = (key[0], key[1], initial, connection)
    if best is None:
        return None
    return best[2], best[3]


def gen_blackbox(
    g: Efg, length: int
) -> tuple[list[tuple[tuple[str, ...], tuple[int, ...]]], list[str]]:
    """Every flow-graph path of exactly ``length`` events, made executable.

    Paths whose head is not initial get a reaching prefix: the cheapest
    initial entry followed by the shortest connection up to (excluding) the
    head.  Returns ``(sequences, unreachable)`` where each sequence is
    ``(events, target_positions)`` and ``unreachable`` lists events no
    initial can reach — no sequence can ever exercise those.
    """
    if length < 1:
        raise GuiseqError(f"sequence length must be positive, got {length}")
    reachable = _reachable_from_initials(g)
    unreachable = [e for e in g.events if e not in reachable]
    initials = set(g.initials)
    sequences: list[tuple[tuple[str, ...], tuple[int, ...]]] = []
    for head in g.events:
        if head not in reachable:
            continue
        for path in _paths_of_length(g, head, length):
            if head in initials:
                prefix: tuple[str, ...] = ()
            else:
                entry = _best_entry(g, head)
                assert entry is not None  # head is reachable
                initial, connection = entry
                prefix = (initial, *connection[:-1])
            events = prefix + path
            targets = tuple(range(len(prefix), len(events)))
            sequences.append((events, targets))
    return sequences, unreachable


# ---------------------------------------------------------------------------
# Grey-box generation
# ---------------------------------------------------------------------------


def gen_abstract(d: Edg, length: int, top: int | None = None) -> list[AbstractSequence]:
    """Dependency-graph paths, best-first, bounded per start event.

    For each event in declaration order: depth-first search over dependency
    successors ordered by descending weight (declaration order on ties).  A
    path is complete at ``length`` events or at a dead end; complete paths
    are collected — skipping any duplicates while searching on — until
    ``top`` of them (unbounded when None) have been found for this start.
    With ``top=None`` the result is exactly the set of maximal
    length-truncated dependency paths from each event.
    """
    if length < 1:
        raise GuiseqError(f"sequence length must be positive, got {length}")
    if top is not None and top < 1:
        raise GuiseqError(f"per-event sequence budget must be positive, got {top}")
    successors = d.successors
    collected: list[AbstractSequence] = []
    seen: set[tuple[str, ...]] = set()

    def search(path: list[str], budget: list[int]) -> None:
        if budget[0] == 0:
            return
        nexts = successors[path[-1]] if len(path) < length else ()
        if not nexts:
            complete = tuple(path)
            if complete not in seen:
                seen.add(complete)
                collected.append(AbstractSequence(events=complete))
                budget[0] -= 1
            return
        for nxt, _weight in nexts:
            path.append(nxt)
            search(path, budget)
            path.pop()
            if budget[0] == 0:
                return

    for start in d.events:
        budget = [top if top is not None else -1]  # -1 never hits zero
        search([start], budget)
    return collected


@dataclass(frozen=True)
class _Part:
    events: tuple[str, ...]
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Conversion:
    """The executable form of one abstract sequence: one part, or several
    when the abstract sequence had to be split."""

    abstract: tuple[str, ...]
    parts: tuple[_Part, ...]


@dataclass(frozen=True)
class ConversionResult:
    conversions: tuple[Conversion, ...]
    diagnostics: tuple[str, ...]


def to_executable(g: Efg, abstracts: Sequence[AbstractSequence]) -> ConversionResult:
    """Repair abstract sequences into executable ones (splitting if needed)."""
    conversions: list[Conversion] = []
    diagnostics: list[str] = []
    for abstract in abstracts:
        parts: list[_Part] = []
        remaining = list(abstract.events)
        dropped = False
        while remaining:
            head = remaining[0]
            entry = _best_entry(g, head)
            if entry is None:
                diagnostics.append(
                    f"abstract sequence {list(abstract.events)!r}: event {head!r} is "
                    "unreachable from the initial events; "
                    + ("remainder dropped" if parts else "sequence skipped")
                )
                dropped = True
                break
            initial, connection = entry
            events: list[str] = [initial, *connection] if connection else [initial]
            targets: list[int] = [len(events) - 1]
            consumed = 1
            for prev, nxt in zip(remaining, remaining[1:]):
                hop = shortest_path(g, prev, nxt, strict=prev == nxt)
                if hop is None:
                    break
                events.extend(hop)
                targets.append(len(events) - 1)
                consumed += 1
            parts.append(_Part(events=tuple(events), targets=tuple(targets)))
            remaining = remaining[consumed:]
        if parts or not dropped:
            conversions.append(
                Conversion(abstract=tuple(abstract.events), parts=tuple(parts))
            )
    return ConversionResult(conversions=tuple(conversions), diagnostics=tuple(diagnostics))


# ---------------------------------------------------------------------------
# Front end
# ---------------------------------------------------------------------------


def _next_id(counter: list[int]) -> str:
    counter[0] += 1
    return f"s{counter[0]:04d}"


def generate_sequences(
    config: GenConfig, efg: Efg, edg: Edg | None = None
) -> GenerationResult:
    """Run a generator configuration and number the resulting records."""
    records: list[SequenceRecord] = []
    diagnostics: list[str] = []
    counter = [0]
    if config.mode == "blackbox":
        sequences, unreachable = gen_blackbox(efg, config.length)
        for event in unreachable:
            diagnostics.append(
                f"event {event!r} is unreachable from the initial events; "
                "no sequence can exercise it"
            )
        for events, targets in sequences:
            records.append(
                SequenceRecord(
                    id=_next_id(counter),
                    events=events,
                    targets=targets,
                    origin="blackbox",
                )
            )
    elif config.mode == "greybox":
        if edg is None:
            raise GuiseqError("grey-box generation needs an event-dependency graph")
        abstracts = gen_abstract(edg, config.length, config.top)
        result = to_executable(efg, abstracts)
        diagnostics.extend(result.diagnostics)
        for conversion in result.conversions:
            root_id: str | None = None
            for part in conversion.parts:
                rid = _next_id(counter)
                records.append(
                    SequenceRecord(
                        id=rid,
                        events=part.events,
                        targets=part.targets,
                        origin="greybox",
                        abstract=conversion.abstract,
                        split_of=root_id,
                    )
                )
                if root_id is None:
                    root_id = rid
    else:
        raise GuiseqError(f"unknown generator mode {config.mode!r}")
    return GenerationResult(records=tuple(records), diagnostics=tuple(diagnostics))


# ---------------------------------------------------------------------------
# Serialization (one JSON object per line)
# ---------------------------------------------------------------------------


def _record_to_json(record: SequenceRecord) -> dict:
    doc: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "id": record.id,
        "events": list(record.events),
        "targets": list(record.targets),
        "origin": record.origin,
    }
    if record.abstract is not None:
        doc["abstract"] = list(record.abstract)
    if record.split_of is not None:
        doc["splitOf"] = record.split_of
    return doc


def save_sequences(records: Sequence[SequenceRecord], path: Path | str) -> None:
    lines = [
        json.dumps(_record_to_json(r), sort_keys=True, separators=(",", ":"))
        for r in records
    ]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_sequences(path: Path | str) -> list[SequenceRecord]:
    records: list[SequenceRecord] = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GuiseqError(f"{path}: line {lineno}: {exc.msg}") from None
        if doc.get("schemaVersion") != SCHEMA_VERSION:
            raise GuiseqError(
                f"{path}: line {lineno}: unsupported schema version "
                f"{doc.get('schemaVersion')!r}"
            )
        try:
            records.append(
                SequenceRecord(
                    id=doc["id"],
                    events=tuple(doc["events"]),
                    targets=tuple(doc["targets"]),
                    origin=doc["origin"],
                    abstract=tuple(doc["abstract"]) if "abstract" in doc else None,
                    split_of=doc.get("splitOf"),
                )
            )
        except KeyError as exc:
            raise GuiseqError(f"{path}: line {lineno}: missing key {exc}") from None
    return records
