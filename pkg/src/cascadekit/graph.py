"""Follower networks, activation logs, and the temporally ordered cascade DAG.

The cascade DAG is the observational object every other module consumes.
Activated nodes are relabeled 1..n in (timestamp, node id) order and an edge
j -> i is kept whenever node i watches node j and i activated strictly later;
simultaneous activations never produce edges in either direction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import IngestionError

_DIRECTIONS = ("fan_to_friend", "friend_to_fan")


@dataclass(frozen=True)
class FollowerGraph:
    """Directed watch network.

    An edge (fan, friend) means the fan sees the friend's activity, so
    information can flow from the friend to the fan.
    """

    nodes: frozenset[int]
    watches: Mapping[int, tuple[int, ...]]
    num_edges: int

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        *,
        direction: str = "fan_to_friend",
        nodes: Iterable[int] = (),
    ) -> "FollowerGraph":
        """Build a graph from (fan, friend) pairs.

        Args:
            edges: iterable of node-id pairs; duplicates are collapsed.
            direction: "fan_to_friend" if each pair is (fan, friend),
                "friend_to_fan" if the pairs are stored the other way around.
            nodes: extra node ids to include even when they touch no edge.
        """
        if direction not in _DIRECTIONS:
            raise ValueError(f"unknown edge direction {direction!r}")
        watch_sets: dict[int, set[int]] = {}
        nodes = set(nodes)
        for a, b in edges:
            fan, friend = (a, b) if direction == "fan_to_friend" else (b, a)
            if fan == friend:
                raise IngestionError(f"self-loop on node {fan}")
            nodes.add(fan)
            nodes.add(friend)
            watch_sets.setdefault(fan, set()).add(friend)
        watches = {fan: tuple(sorted(s)) for fan, s in watch_sets.items()}
        num_edges = sum(len(t) for t in watches.values())
        return cls(nodes=frozenset(nodes), watches=watches, num_edges=num_edges)

    def friends_of(self, node: int) -> tuple[int, ...]:
        """Nodes whose activity `node` sees (empty for unknown nodes)."""
        return self.watches.get(node, ())

    def fans_of(self) -> dict[int, tuple[int, ...]]:
        """Reverse adjacency: friend -> fans watching it."""
        rev: dict[int, list[int]] = {}
        for fan, friends in self.watches.items():
            for friend in friends:
                rev.setdefault(friend, []).append(fan)
        return {k: tuple(sorted(v)) for k, v in rev.items()}


@dataclass(frozen=True)
class ActivationLog:
    """Per-story vote records as (node id, timestamp), in file order."""

    story_id: str
    records: tuple[tuple[int, float], ...]

    @classmethod
    def from_records(
        cls, story_id: str, records: Iterable[tuple[int, float]]
    ) -> "ActivationLog":
        seen: set[int] = set()
        cleaned: list[tuple[int, float]] = []
        for node, t in records:
            t = float(t)
            if not math.isfinite(t) or t < 0:
                raise IngestionError(
                    f"story {story_id!r}: bad timestamp {t!r} for node {node}"
                )
            if node in seen:
                raise IngestionError(
                    f"story {story_id!r}: node {node} activated more than once"
                )
            seen.add(node)
            cleaned.append((node, t))
        return cls(story_id=story_id, records=tuple(cleaned))

    def __len__(self) -> int:
        return len(self.records)

    def sorted_records(self) -> list[tuple[int, float]]:
        """Records in label order: ascending timestamp, node id breaking ties."""
        return sorted(self.records, key=lambda r: (r[1], r[0]))


@dataclass(frozen=True)
class CascadeGraph:
    """Activation DAG of one story.

    Labels are 1..n in activation order; `in_edges[k]` holds the sorted labels
    with an active edge into label k+1. Seeds are the labels with no in-edges.
    """

    story_id: str
    node_ids: tuple[int, ...]
    timestamps: tuple[float, ...]
    in_edges: tuple[tuple[int, ...], ...]
    seeds: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.node_ids)
        if not (len(self.timestamps) == len(self.in_edges) == n):
            raise ValueError("node_ids, timestamps and in_edges must align")

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def node_of(self, label: int) -> int:
        return self.node_ids[label - 1]

    def timestamp_of(self, label: int) -> float:
        return self.timestamps[label - 1]

    @cached_property
    def label_of(self) -> Mapping[int, int]:
        return {node: k + 1 for k, node in enumerate(self.node_ids)}

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, preds in enumerate(self.in_edges, start=1):
            for j in preds:
                out[j - 1].append(i)
        return tuple(tuple(x) for x in out)

    def out_degree(self, label: int) -> int:
        return len(self.out_edges[label - 1])


def build_cascade_graph(
    graph: FollowerGraph, log: ActivationLog, *, strict: bool = False
) -> CascadeGraph:
    """Construct the activation DAG for one story.

    Voters absent from the follower graph become isolated seeds unless
    `strict` is set, in which case they are an ingestion error.
    """
    order = log.sorted_records()
    node_ids: list[int] = []
    timestamps: list[float] = []
    in_edges: list[tuple[int, ...]] = []
    label_by_node: dict[int, int] = {}
    for node, t in order:
        if node not in graph.nodes:
            if strict:
                raise IngestionError(
                    f"story {log.story_id!r}: voter {node} not in follower graph"
                )
            friends: tuple[int, ...] = ()
        else:
            friends = graph.friends_of(node)
        preds = sorted(
            label_by_node[f]
            for f in friends
            if f in label_by_node and timestamps[label_by_node[f] - 1] < t
        )
        node_ids.append(node)
        timestamps.append(t)
        in_edges.append(tuple(preds))
        label_by_node[node] = len(node_ids)
    seeds = tuple(k + 1 for k, preds in enumerate(in_edges) if not preds)
    return CascadeGraph(
        story_id=log.story_id,
        node_ids=tuple(node_ids),
        timestamps=tuple(timestamps),
        in_edges=tuple(in_edges),
        seeds=seeds,
    )


def classify_seeds(cg: CascadeGraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split seed labels into (active, trivial) by whether they spread at all."""
    active = tuple(s for s in cg.seeds if cg.out_degree(s) > 0)
    trivial = tuple(s for s in cg.seeds if cg.out_degree(s) == 0)
    return active, trivial


# ---------------------------------------------------------------------------
# CSV ingestion and export
# ---------------------------------------------------------------------------

GRAPH_HEADER = ["fan_id", "friend_id"]
VOTES_HEADER = ["story_id", "node_id", "timestamp"]


def _parse_int(text: str, path: Path, line_no: int, column: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise IngestionError(
            f"{path}:{line_no}: column {column!r} is not an integer: {text!r}"
        ) from None


def load_follower_graph(path: str | Path) -> FollowerGraph:
    """Read a follower graph from a `fan_id,friend_id` CSV file."""
    path = Path(path)
    pairs: list[tuple[int, int]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != GRAPH_HEADER:
            raise IngestionError(
                f"{path}:1: expected header {','.join(GRAPH_HEADER)!r}, got {header!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise IngestionError(
                    f"{path}:{line_no}: expected 2 columns, got {len(row)}"
                )
            fan = _parse_int(row[0], path, line_no, "fan_id")
            friend = _parse_int(row[1], path, line_no, "friend_id")
            if fan == friend:
                raise IngestionError(f"{path}:{line_no}: self-loop on node {fan}")
            pairs.append((fan, friend))
    return FollowerGraph.from_edges(pairs)


def load_activation_logs(path: str | Path) -> dict[str, ActivationLog]:
    """Read every story's activation log from a `story_id,node_id,timestamp` CSV.

    Stories are returned keyed by id, in order of first appearance.
    """
    path = Path(path)
    raw: dict[str, list[tuple[int, float]]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != VOTES_HEADER:
            raise IngestionError(
                f"{path}:1: expected header {','.join(VOTES_HEADER)!r}, got {header!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise IngestionError(
                    f"{path}:{line_no}: expected 3 columns, got {len(row)}"
                )
            story = row[0].strip()
            if not story:
                raise IngestionError(f"{path}:{line_no}: empty story_id")
            node = _parse_int(row[1], path, line_no, "node_id")
            try:
                t = float(row[2].strip())
            except ValueError:
                raise IngestionError(
                    f"{path}:{line_no}: column 'timestamp' is not a number: {row[2]!r}"
                ) from None
            raw.setdefault(story, []).append((node, t))
    return {
        story: ActivationLog.from_records(story, records)
        for story, records in raw.items()
    }


def save_follower_graph(path: str | Path, graph: FollowerGraph) -> None:
    """Write a follower graph as a `fan_id,friend_id` CSV file."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRAPH_HEADER)
        for fan in sorted(graph.watches):
            for friend in graph.watches[fan]:
                writer.writerow([fan, friend])


def save_activation_logs(path: str | Path, logs: Iterable[ActivationLog]) -> None:
    """Write activation logs as a `story_id,node_id,timestamp` CSV file."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(VOTES_HEADER)
        for log in logs:
            for node, t in log.records:
                writer.writerow([log.story_id, node, repr(t)])


def iter_story_graphs(
    graph: FollowerGraph,
    logs: Mapping[str, ActivationLog],
    *,
    strict: bool = False,
) -> Iterator[CascadeGraph]:
    """Yield each story's cascade graph in the mapping's order."""
    for log in logs.values():
        yield build_cascade_graph(graph, log, strict=strict)
