"""Cascade influence engine.

Every activated node j carries, for each seed s_p, the attenuated path value

    f(j, p, alpha) = sum_l counts[l] * alpha**l

where counts[l] is the number of distinct active paths of length l from the
seed to j. The engine computes these values with a single forward pass over
the activation order: a node's row is the alpha-scaled sum of its in-edges'
rows. Two companion quantities are maintained per (node, seed):

    C = f itself (the contagion value), and
    L = alpha * df/dalpha, so L(1) is the total length of all seed paths.

Numeric mode stores floats; exact mode stores the integer length histograms
themselves, which is what tier detection and reconstruction consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Mapping, Sequence

from .errors import IngestionError, StreamOrderError
from .graph import CascadeGraph, FollowerGraph

DEFAULT_ALPHA = 0.5

_NEG_INF = float("-inf")


def check_alpha(alpha: float) -> float:
    """Validate the attenuation factor, returning it as a float."""
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"attenuation must be in (0, 1], got {alpha}")
    return alpha


@dataclass(frozen=True)
class SeedWeights:
    """Initial influence assigned to each seed, keyed by node id (default 1)."""

    by_node: Mapping[int, float] = field(default_factory=dict)
    default: float = 1.0

    def weight_for(self, node_id: int) -> float:
        w = float(self.by_node.get(node_id, self.default))
        if not (w > 0.0) or not math.isfinite(w):
            raise ValueError(f"seed weight for node {node_id} must be positive, got {w}")
        return w


UNIT_WEIGHTS = SeedWeights()


# ---------------------------------------------------------------------------
# Forward-pass builders (shared by batch and streaming computation)
# ---------------------------------------------------------------------------


class _TableBuilder:
    """Incremental numeric pass: one (C, L) row per pushed activation."""

    __slots__ = ("alpha", "rows", "seed_labels")

    def __init__(self, alpha: float) -> None:
        self.alpha = check_alpha(alpha)
        self.rows: list[dict[int, tuple[float, float]]] = []
        self.seed_labels: list[int] = []

    def push(self, in_edges: Sequence[int]) -> dict[int, tuple[float, float]]:
        rows = self.rows
        label = len(rows) + 1
        if not in_edges:
            p = len(self.seed_labels)
            self.seed_labels.append(label)
            row = {p: (1.0, 0.0)}
        else:
            acc: dict[int, list[float]] = {}
            for j in in_edges:
                for p, (c, l) in rows[j - 1].items():
                    entry = acc.get(p)
                    if entry is None:
                        acc[p] = [c, c + l]
                    else:
                        entry[0] += c
                        entry[1] += c + l
            a = self.alpha
            row = {p: (a * c, a * s) for p, (c, s) in acc.items()}
        rows.append(row)
        return row


class _ProfileBuilder:
    """Incremental exact pass: one sparse length histogram per (node, seed)."""

    __slots__ = ("rows", "seed_labels")

    def __init__(self) -> None:
        self.rows: list[dict[int, dict[int, int]]] = []
        self.seed_labels: list[int] = []

    def push(self, in_edges: Sequence[int]) -> dict[int, dict[int, int]]:
        rows = self.rows
        label = len(rows) + 1
        if not in_edges:
            p = len(self.seed_labels)
            self.seed_labels.append(label)
            row: dict[int, dict[int, int]] = {p: {0: 1}}
        else:
            row = {}
            for j in in_edges:
                for p, hist in rows[j - 1].items():
                    dst = row.get(p)
                    if dst is None:
                        dst = row[p] = {}
                    for length, count in hist.items():
                        shifted = length + 1
                        dst[shifted] = dst.get(shifted, 0) + count
        rows.append(row)
        return row


class _LogPhiBuilder:
    """Forward pass in log space, for overflow-proof influence ranking."""

    __slots__ = ("log_alpha", "rows", "seed_labels")

    def __init__(self, alpha: float) -> None:
        self.log_alpha = math.log(check_alpha(alpha))
        self.rows: list[dict[int, float]] = []
        self.seed_labels: list[int] = []

    def push(self, in_edges: Sequence[int]) -> dict[int, float]:
        rows = self.rows
        label = len(rows) + 1
        if not in_edges:
            p = len(self.seed_labels)
            self.seed_labels.append(label)
            row = {p: 0.0}
        else:
            acc: dict[int, list[float]] = {}
            for j in in_edges:
                for p, lf in rows[j - 1].items():
                    acc.setdefault(p, []).append(lf)
            row = {}
            for p, logs in acc.items():
                m = max(logs)
                row[p] = self.log_alpha + m + math.log(
                    sum(math.exp(x - m) for x in logs)
                )
        rows.append(row)
        return row


# ---------------------------------------------------------------------------
# Batch results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContagionLengthTable:
    """Numeric C and L values, sparse over (label, seed index).

    Rows are keyed by seed index in activation order of the seeds; a missing
    key means the node is not reachable from that seed. Seed columns only
    materialize once some node joins the cascade, so trivial seeds stay free.
    """

    alpha: float
    seeds: tuple[int, ...]
    rows: tuple[Mapping[int, tuple[float, float]], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    def seed_index(self, seed_label: int) -> int:
        return self.seeds.index(seed_label)

    def contagion(self, label: int, seed_label: int) -> float:
        entry = self.rows[label - 1].get(self.seed_index(seed_label))
        return entry[0] if entry is not None else 0.0

    def length(self, label: int, seed_label: int) -> float:
        entry = self.rows[label - 1].get(self.seed_index(seed_label))
        return entry[1] if entry is not None else 0.0

    def members(self, seed_label: int) -> frozenset[int]:
        p = self.seed_index(seed_label)
        return frozenset(
            label for label, row in enumerate(self.rows, start=1) if p in row
        )


@dataclass(frozen=True)
class PathProfile:
    """Exact per-(node, seed) histograms of active path lengths.

    `rows[label - 1][p][l]` is the number of distinct active paths of length
    l from seed index p to the node, stored as exact integers. A histogram
    {0: 1} marks the seed itself.
    """

    seeds: tuple[int, ...]
    rows: tuple[Mapping[int, Mapping[int, int]], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    def seed_index(self, seed_label: int) -> int:
        return self.seeds.index(seed_label)

    def histogram(self, label: int, seed_label: int) -> dict[int, int]:
        return dict(self.rows[label - 1].get(self.seed_index(seed_label), {}))

    def evaluate_f(self, label: int, seed_label: int, alpha):
        """f(label, seed, alpha); works for floats and Fractions alike."""
        hist = self.rows[label - 1].get(self.seed_index(seed_label))
        if not hist:
            return 0 * alpha
        return sum(count * alpha**length for length, count in hist.items())

    def phi(self, label: int, alpha, weights: SeedWeights | None = None, node_ids=None):
        """Weighted influence of a node, evaluated from the exact histograms."""
        total = 0 * alpha
        for p, hist in self.rows[label - 1].items():
            w = 1.0 if weights is None else weights.weight_for(node_ids[self.seeds[p] - 1])
            total += w * sum(count * alpha**length for length, count in hist.items())
        return total

    def derivative(self, label: int, alpha) -> float:
        """d f/d alpha summed over seeds with unit weights."""
        total = 0.0
        for hist in self.rows[label - 1].values():
            for length, count in hist.items():
                if length:
                    total += length * count * alpha ** (length - 1)
        return total

    def total_paths(self, label: int, seed_label: int) -> int:
        return sum(self.histogram(label, seed_label).values())

    def total_length(self, label: int, seed_label: int) -> int:
        return sum(l * c for l, c in self.histogram(label, seed_label).items())

    def members(self, seed_label: int) -> frozenset[int]:
        p = self.seed_index(seed_label)
        return frozenset(
            label for label, row in enumerate(self.rows, start=1) if p in row
        )

    def signature(self, label: int):
        """Canonical hashable form of the full per-seed histogram vector."""
        return tuple(
            sorted(
                (p, tuple(sorted(hist.items())))
                for p, hist in self.rows[label - 1].items()
                if hist
            )
        )


def _run_builder(builder, cg: CascadeGraph):
    for preds in cg.in_edges:
        builder.push(preds)
    if tuple(builder.seed_labels) != cg.seeds:
        raise RuntimeError("seed set diverged from the cascade graph")
    return builder


def compute_tables(cg: CascadeGraph, alpha: float = DEFAULT_ALPHA) -> ContagionLengthTable:
    """Numeric C and L tables for every (node, seed) pair of one story."""
    builder = _run_builder(_TableBuilder(alpha), cg)
    return ContagionLengthTable(
        alpha=builder.alpha, seeds=cg.seeds, rows=tuple(builder.rows)
    )


def compute_path_profiles(cg: CascadeGraph) -> PathProfile:
    """Exact path-length histograms for every (node, seed) pair of one story."""
    builder = _run_builder(_ProfileBuilder(), cg)
    return PathProfile(seeds=cg.seeds, rows=tuple(builder.rows))


# ---------------------------------------------------------------------------
# Influence series
# ---------------------------------------------------------------------------

PHI_CSV_HEADER = ["label", "node_id", "timestamp", "seed_index", "f_value", "phi_total"]


@dataclass(frozen=True)
class PhiSeries:
    """Per-node influence decomposition of one story at a fixed attenuation."""

    story_id: str
    alpha: float
    seeds: tuple[int, ...]
    weights: tuple[float, ...]
    node_ids: tuple[int, ...]
    timestamps: tuple[float, ...]
    f_rows: tuple[Mapping[int, float], ...]
    phi: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.f_rows)

    def f_value(self, label: int, seed_label: int) -> float:
        return self.f_rows[label - 1].get(self.seeds.index(seed_label), 0.0)

    def phi_of(self, label: int) -> float:
        return self.phi[label - 1]

    def csv_rows(self) -> Iterator[tuple]:
        for label, row in enumerate(self.f_rows, start=1):
            node = self.node_ids[label - 1]
            t = self.timestamps[label - 1]
            total = self.phi[label - 1]
            for p in sorted(row):
                yield (label, node, t, p + 1, row[p], total)

    def write_csv(self, target: str | Path | IO[str]) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="") as fh:
                self.write_csv(fh)
            return
        target.write(",".join(PHI_CSV_HEADER) + "\n")
        for label, node, t, p, f, total in self.csv_rows():
            target.write(f"{label},{node},{t!r},{p},{f!r},{total!r}\n")


def _series_from_rows(
    cg_like, rows: Sequence[Mapping[int, tuple[float, float]]],
    seeds: Sequence[int], alpha: float, weights: SeedWeights
) -> PhiSeries:
    node_ids = tuple(cg_like.node_ids)
    w = tuple(weights.weight_for(node_ids[s - 1]) for s in seeds)
    f_rows = []
    phi = []
    for row in rows:
        f = {p: entry[0] for p, entry in row.items()}
        f_rows.append(f)
        phi.append(sum(f[p] * w[p] for p in f))
    return PhiSeries(
        story_id=cg_like.story_id,
        alpha=alpha,
        seeds=tuple(seeds),
        weights=w,
        node_ids=node_ids,
        timestamps=tuple(cg_like.timestamps),
        f_rows=tuple(f_rows),
        phi=tuple(phi),
    )


def phi_series(
    cg: CascadeGraph,
    alpha: float = DEFAULT_ALPHA,
    weights: SeedWeights | None = None,
    *,
    tables: ContagionLengthTable | None = None,
) -> PhiSeries:
    """Influence of every activation, decomposed by seed.

    The influence of node j is `phi(j) = sum_p f(j, p, alpha) * w_p`; seeds
    report their own weight.
    """
    weights = weights or UNIT_WEIGHTS
    if tables is None:
        tables = compute_tables(cg, alpha)
    elif tables.alpha != check_alpha(alpha):
        raise ValueError("tables were computed at a different attenuation")
    return _series_from_rows(cg, tables.rows, tables.seeds, tables.alpha, weights)


def phi_derivative(
    cg: CascadeGraph,
    alpha: float = DEFAULT_ALPHA,
    weights: SeedWeights | None = None,
    *,
    tables: ContagionLengthTable | None = None,
) -> tuple[float, ...]:
    """d phi/d alpha per label, from the length table: L(alpha) / alpha.

    At alpha = 1 this is the total length of all active seed paths into the
    node, which is what the L column accumulates.
    """
    weights = weights or UNIT_WEIGHTS
    if tables is None:
        tables = compute_tables(cg, alpha)
    elif tables.alpha != check_alpha(alpha):
        raise ValueError("tables were computed at a different attenuation")
    a = tables.alpha
    w = tuple(weights.weight_for(cg.node_ids[s - 1]) for s in tables.seeds)
    out = []
    for row in tables.rows:
        out.append(sum((entry[1] / a) * w[p] for p, entry in row.items()))
    return tuple(out)


@dataclass(frozen=True)
class CascadeRank:
    """Summary of one seed's cascade for ranking by peak influence."""

    seed_index: int
    seed_label: int
    seed_node_id: int
    size: int
    log10_max_phi: float
    max_phi: float


def rank_cascades(
    cg: CascadeGraph,
    alpha: float = DEFAULT_ALPHA,
    weights: SeedWeights | None = None,
) -> tuple[CascadeRank, ...]:
    """Cascades ordered by their largest influence value, computed in log space.

    The log-space pass keeps the ranking meaningful even when plain floats
    would overflow or underflow on deep cascades.
    """
    weights = weights or UNIT_WEIGHTS
    builder = _run_builder(_LogPhiBuilder(alpha), cg)
    seeds = cg.seeds
    log_w = [math.log(weights.weight_for(cg.node_ids[s - 1])) for s in seeds]
    best = [_NEG_INF] * len(seeds)
    size = [0] * len(seeds)
    for row in builder.rows:
        for p, lf in row.items():
            size[p] += 1
            v = lf + log_w[p]
            if v > best[p]:
                best[p] = v
    ranks = [
        CascadeRank(
            seed_index=p + 1,
            seed_label=seeds[p],
            seed_node_id=cg.node_ids[seeds[p] - 1],
            size=size[p],
            log10_max_phi=best[p] / math.log(10.0),
            max_phi=math.exp(best[p]) if best[p] < 709.0 else math.inf,
        )
        for p in range(len(seeds))
    ]
    ranks.sort(key=lambda r: (-r.log10_max_phi, r.seed_label))
    return tuple(ranks)


# ---------------------------------------------------------------------------
# Streaming computation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StreamUpdate:
    """Row emitted for one streamed activation; earlier rows never change."""

    label: int
    node_id: int
    timestamp: float
    is_seed: bool
    f: Mapping[int, float]
    phi: float


class CascadeStream:
    """Incremental influence over a live activation feed.

    Activations must arrive in non-decreasing timestamp order; each push
    appends exactly one row, computed from the rows already emitted, so the
    final state is identical to the batch computation over the same order.
    """

    def __init__(
        self,
        graph: FollowerGraph,
        alpha: float = DEFAULT_ALPHA,
        weights: SeedWeights | None = None,
        *,
        story_id: str = "stream",
        strict: bool = False,
    ) -> None:
        self._graph = graph
        self._weights = weights or UNIT_WEIGHTS
        self._strict = strict
        self._builder = _TableBuilder(alpha)
        self._story_id = story_id
        self._node_ids: list[int] = []
        self._timestamps: list[float] = []
        self._in_edges: list[tuple[int, ...]] = []
        self._label_by_node: dict[int, int] = {}
        self._seed_weights: list[float] = []

    @property
    def alpha(self) -> float:
        return self._builder.alpha

    @property
    def n(self) -> int:
        return len(self._node_ids)

    def push(self, node_id: int, timestamp: float) -> StreamUpdate:
        t = float(timestamp)
        if not math.isfinite(t) or t < 0:
            raise IngestionError(f"bad timestamp {timestamp!r} for node {node_id}")
        if self._timestamps and t < self._timestamps[-1]:
            raise StreamOrderError(node_id, t, self._timestamps[-1])
        if node_id in self._label_by_node:
            raise IngestionError(f"node {node_id} activated more than once")
        if node_id not in self._graph.nodes:
            if self._strict:
                raise IngestionError(f"voter {node_id} not in follower graph")
            friends: tuple[int, ...] = ()
        else:
            friends = self._graph.friends_of(node_id)
        preds = sorted(
            self._label_by_node[f]
            for f in friends
            if f in self._label_by_node
            and self._timestamps[self._label_by_node[f] - 1] < t
        )
        row = self._builder.push(preds)
        self._node_ids.append(node_id)
        self._timestamps.append(t)
        self._in_edges.append(tuple(preds))
        label = len(self._node_ids)
        self._label_by_node[node_id] = label
        is_seed = not preds
        if is_seed:
            self._seed_weights.append(self._weights.weight_for(node_id))
        f = {p: entry[0] for p, entry in row.items()}
        phi = sum(f[p] * self._seed_weights[p] for p in f)
        return StreamUpdate(
            label=label,
            node_id=node_id,
            timestamp=t,
            is_seed=is_seed,
            f=f,
            phi=phi,
        )

    def cascade_graph(self) -> CascadeGraph:
        return CascadeGraph(
            story_id=self._story_id,
            node_ids=tuple(self._node_ids),
            timestamps=tuple(self._timestamps),
            in_edges=tuple(self._in_edges),
            seeds=tuple(self._builder.seed_labels),
        )

    def tables(self) -> ContagionLengthTable:
        return ContagionLengthTable(
            alpha=self._builder.alpha,
            seeds=tuple(self._builder.seed_labels),
            rows=tuple(dict(r) for r in self._builder.rows),
        )

    def phi_series(self) -> PhiSeries:
        return _series_from_rows(
            self.cascade_graph(),
            self._builder.rows,
            self._builder.seed_labels,
            self._builder.alpha,
            self._weights,
        )
