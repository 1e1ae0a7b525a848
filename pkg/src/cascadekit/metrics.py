"""Macroscopic cascade metrics derived from the influence tables.

All path statistics are evaluated at attenuation 1, where the contagion
value counts active seed paths and the length value sums their lengths.
Membership is structural (a node belongs to every cascade it has a path
from), so it does not depend on the attenuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .engine import ContagionLengthTable, PathProfile, compute_path_profiles, compute_tables
from .graph import CascadeGraph, classify_seeds

_MAX_EXACT_FLOAT = float(2**53)

TableLike = Union[ContagionLengthTable, PathProfile]


def cascade_membership(source: TableLike) -> dict[int, frozenset[int]]:
    """Member labels of each cascade, keyed by seed label (seed included)."""
    return {seed: source.members(seed) for seed in source.seeds}


def spread(
    cg: CascadeGraph, membership: Mapping[int, frozenset[int]] | None = None
) -> dict[int, int]:
    """Largest number of direct activations any member of each cascade caused.

    An out-edge of a member always lands inside the same cascade, so the
    restricted out-degree equals the plain out-degree of the member.
    """
    if membership is None:
        membership = cascade_membership(compute_tables(cg, 1.0))
    out = {}
    for seed, members in membership.items():
        out[seed] = max((cg.out_degree(m) for m in members), default=0)
    return out


def process_spread(cg: CascadeGraph) -> int:
    """Largest out-degree over the whole activation DAG."""
    return max((len(e) for e in cg.out_edges), default=0)


def depth_by_label(cg: CascadeGraph) -> tuple[int, ...]:
    """Longest active path ending at each label (0 for seeds)."""
    depth = [0] * cg.n
    for i, preds in enumerate(cg.in_edges, start=1):
        if preds:
            depth[i - 1] = 1 + max(depth[j - 1] for j in preds)
    return tuple(depth)


def diameter(cg: CascadeGraph) -> tuple[dict[int, int], int]:
    """(per-cascade longest path from the seed, process-wide longest path)."""
    rows: list[dict[int, int]] = []
    seed_index: dict[int, int] = {}
    per_seed: dict[int, int] = {}
    for i, preds in enumerate(cg.in_edges, start=1):
        if not preds:
            p = len(seed_index)
            seed_index[i] = p
            rows.append({p: 0})
            continue
        row: dict[int, int] = {}
        for j in preds:
            for p, d in rows[j - 1].items():
                nd = d + 1
                if row.get(p, -1) < nd:
                    row[p] = nd
        rows.append(row)
    best = [0] * len(seed_index)
    for row in rows:
        for p, d in row.items():
            if d > best[p]:
                best[p] = d
    for seed, p in seed_index.items():
        per_seed[seed] = best[p]
    return per_seed, max(best, default=0)


def _as_count(value) -> int | float:
    """Report an alpha=1 accumulation as an exact int when it is one."""
    if isinstance(value, int):
        return value
    if value <= _MAX_EXACT_FLOAT and float(value).is_integer():
        return int(value)
    return value


@dataclass(frozen=True)
class PathStats:
    """Totals over all active seed paths, per cascade and process-wide."""

    total_paths: dict[int, int | float]
    total_length: dict[int, int | float]
    process_paths: int | float
    process_length: int | float

    def avg_length(self, seed: int) -> float | None:
        paths = self.total_paths[seed]
        if not paths:
            return None
        return self.total_length[seed] / paths

    @property
    def process_avg_length(self) -> float | None:
        if not self.process_paths:
            return None
        return self.process_length / self.process_paths


def path_stats(source: TableLike) -> PathStats:
    """Path totals from alpha=1 tables or exact profiles.

    The seed's own zero-length self path is excluded from every total.
    """
    if isinstance(source, ContagionLengthTable) and source.alpha != 1.0:
        raise ValueError("path statistics need tables computed at attenuation 1")
    exact = isinstance(source, PathProfile)
    seeds = source.seeds
    tp = dict.fromkeys(seeds, 0)
    tl = dict.fromkeys(seeds, 0)
    for label, row in enumerate(source.rows, start=1):
        for p, entry in row.items():
            seed = seeds[p]
            if label == seed:
                continue
            if exact:
                tp[seed] += sum(entry.values())
                tl[seed] += sum(l * c for l, c in entry.items())
            else:
                tp[seed] += entry[0]
                tl[seed] += entry[1]
    tp = {s: _as_count(v) for s, v in tp.items()}
    tl = {s: _as_count(v) for s, v in tl.items()}
    return PathStats(
        total_paths=tp,
        total_length=tl,
        process_paths=_as_count(sum(tp.values())),
        process_length=_as_count(sum(tl.values())),
    )


@dataclass(frozen=True)
class CascadeSummary:
    """Metrics of one seed's cascade."""

    seed_label: int
    seed_node_id: int
    active: bool
    size: int
    spread: int
    diameter: int
    total_paths: int | float
    total_path_length: int | float
    avg_path_length: float | None

    def to_json_dict(self) -> dict:
        out = {
            "seed_label": self.seed_label,
            "seed_node_id": self.seed_node_id,
            "active": self.active,
            "size": self.size,
            "spread": self.spread,
            "diameter": self.diameter,
            "total_paths": self.total_paths,
            "total_path_length": self.total_path_length,
        }
        if self.avg_path_length is not None:
            out["avg_path_length"] = self.avg_path_length
        return out


@dataclass(frozen=True)
class CascadeMetrics:
    """Full metric report for one story."""

    story_id: str
    num_seeds: int
    num_cascades: int
    size: int
    spread: int
    diameter: int
    total_paths: int | float
    total_path_length: int | float
    avg_path_length: float | None
    cascades: tuple[CascadeSummary, ...]

    def to_json_dict(self) -> dict:
        out = {
            "story_id": self.story_id,
            "num_seeds": self.num_seeds,
            "num_cascades": self.num_cascades,
            "size": self.size,
            "spread": self.spread,
            "diameter": self.diameter,
            "total_paths": self.total_paths,
            "total_path_length": self.total_path_length,
            "cascades": [c.to_json_dict() for c in self.cascades],
        }
        if self.avg_path_length is not None:
            out["avg_path_length"] = self.avg_path_length
        return out


def story_metrics(cg: CascadeGraph, *, mode: str = "numeric") -> CascadeMetrics:
    """Compute the complete metric report for one story.

    Args:
        cg: the story's activation DAG.
        mode: "numeric" uses float tables at attenuation 1; "exact" uses
            integer path histograms (safe for astronomically many paths).
    """
    if mode == "numeric":
        source: TableLike = compute_tables(cg, 1.0)
    elif mode == "exact":
        source = compute_path_profiles(cg)
    else:
        raise ValueError(f"unknown metrics mode {mode!r}")
    membership = cascade_membership(source)
    spreads = spread(cg, membership)
    diam_per_seed, diam_process = diameter(cg)
    stats = path_stats(source)
    active, _trivial = classify_seeds(cg)
    active_set = set(active)
    summaries = []
    for seed in cg.seeds:
        summaries.append(
            CascadeSummary(
                seed_label=seed,
                seed_node_id=cg.node_of(seed),
                active=seed in active_set,
                size=len(membership[seed]),
                spread=spreads[seed],
                diameter=diam_per_seed[seed],
                total_paths=stats.total_paths[seed],
                total_path_length=stats.total_length[seed],
                avg_path_length=stats.avg_length(seed),
            )
        )
    return CascadeMetrics(
        story_id=cg.story_id,
        num_seeds=len(cg.seeds),
        num_cascades=len(active),
        size=cg.n,
        spread=process_spread(cg),
        diameter=diam_process,
        total_paths=stats.process_paths,
        total_path_length=stats.process_length,
        avg_path_length=stats.process_avg_length,
        cascades=tuple(summaries),
    )
