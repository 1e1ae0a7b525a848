"""Tier detection and cascade-graph reconstruction from exact path profiles.

Two nodes are isomorphic when their full per-seed path-length histograms
agree exactly; the tiers are the equivalence classes. Reconstruction inverts
the forward pass: a non-seed node's histogram vector must equal the
alpha-shifted sum of its parents' vectors, so candidate parent sets are
found by decomposing the unshifted vector over the tiers of earlier nodes.
Every edge asserted as "exact" is forced by that decomposition; anything
else is reported as "tier-ambiguous".
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Mapping, Sequence

from .engine import PathProfile
from .errors import ReconstructionError

CONFIDENCE_EXACT = "exact"
CONFIDENCE_TIER = "tier-ambiguous"


@dataclass(frozen=True)
class TierPartition:
    """Isomorphism classes of one story's nodes, ordered by smallest member."""

    tiers: tuple[tuple[int, ...], ...]

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)

    def tier_of(self, label: int) -> int:
        return self._index[label]

    @property
    def _index(self) -> dict[int, int]:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {
                label: t for t, members in enumerate(self.tiers) for label in members
            }
            self.__dict__["_index_cache"] = idx
        return idx

    def as_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(t) for t in self.tiers)


def tier_partition(profiles: PathProfile) -> TierPartition:
    """Group labels whose full per-seed histogram vectors are identical."""
    groups: dict[tuple, list[int]] = {}
    for label in range(1, profiles.n + 1):
        groups.setdefault(profiles.signature(label), []).append(label)
    tiers = sorted(groups.values(), key=lambda members: members[0])
    return TierPartition(tiers=tuple(tuple(m) for m in tiers))


@dataclass(frozen=True)
class ReconstructedEdge:
    src: int
    dst: int
    confidence: str


@dataclass(frozen=True)
class ReconstructedGraph:
    """Edges recovered from path profiles alone, with per-edge confidence.

    `ambiguous` lists the labels whose parent-tier multiset is not uniquely
    determined by the profiles (several distinct decompositions exist, or
    enumeration was cut short); their edges come from one consistent choice
    and are never labeled exact.
    """

    n: int
    seeds: tuple[int, ...]
    edges: tuple[ReconstructedEdge, ...]
    tiers: tuple[tuple[int, ...], ...]
    unresolved: tuple[int, ...]
    ambiguous: tuple[int, ...] = ()

    def edge_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((e.src, e.dst) for e in self.edges)

    def exact_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (e.src, e.dst) for e in self.edges if e.confidence == CONFIDENCE_EXACT
        )

    def to_json_dict(self) -> dict:
        return {
            "edges": [
                {"from": e.src, "to": e.dst, "confidence": e.confidence}
                for e in self.edges
            ],
            "tiers": [list(t) for t in self.tiers],
            "seeds": list(self.seeds),
            "unresolved": list(self.unresolved),
            "ambiguous": list(self.ambiguous),
        }


class _StopSearch(Exception):
    pass


def _decompose(
    target: dict[tuple[int, int], int],
    cand: Sequence[int],
    vecs: Sequence[dict[tuple[int, int], int]],
    avail: Mapping[int, int],
    budget: int,
    cap: int,
) -> tuple[list[dict[int, int]], bool]:
    """Enumerate multiplicity assignments k_T with sum_T k_T * vec_T == target.

    Returns (solutions, complete); `complete` is False when the step budget
    or the solution cap cut enumeration short.
    """
    maxlen = [max((l for (_p, l) in vecs[t]), default=0) for t in cand]
    suffix_max: list[int] = [-1] * (len(cand) + 1)
    for i in range(len(cand) - 1, -1, -1):
        suffix_max[i] = max(maxlen[i], suffix_max[i + 1])

    solutions: list[dict[int, int]] = []
    assign: dict[int, int] = {}
    failed: set[tuple[int, tuple]] = set()
    state = {"steps": 0, "complete": True}

    def dfs(idx: int, res: dict[tuple[int, int], int]) -> None:
        state["steps"] += 1
        if state["steps"] > budget:
            state["complete"] = False
            raise _StopSearch
        if not res:
            solutions.append(dict(assign))
            if len(solutions) >= cap:
                state["complete"] = False
                raise _StopSearch
            return
        if idx == len(cand):
            return
        if max(l for (_p, l) in res) > suffix_max[idx]:
            return
        key = (idx, tuple(sorted(res.items())))
        if key in failed:
            return
        t = cand[idx]
        vec = vecs[t]
        kmax = avail[t]
        for coord, c in vec.items():
            r = res.get(coord, 0) // c
            if r < kmax:
                kmax = r
            if not kmax:
                break
        before = len(solutions)
        for k in range(kmax, 0, -1):
            res2 = dict(res)
            for coord, c in vec.items():
                nv = res2[coord] - k * c
                if nv:
                    res2[coord] = nv
                else:
                    del res2[coord]
            assign[t] = k
            dfs(idx + 1, res2)
            del assign[t]
        dfs(idx + 1, res)
        if len(solutions) == before:
            failed.add(key)

    try:
        dfs(0, dict(target))
    except _StopSearch:
        pass
    return solutions, state["complete"]


def _is_seed_row(row: Mapping[int, Mapping[int, int]]) -> bool:
    if len(row) != 1:
        return False
    hist = next(iter(row.values()))
    return dict(hist) == {0: 1}


def reconstruct(
    profiles: PathProfile,
    *,
    in_degrees: Mapping[int, int] | None = None,
    out_degrees: Mapping[int, int] | None = None,
    search_budget: int = 250_000,
    solution_cap: int = 16,
) -> ReconstructedGraph:
    """Recover the activation DAG from exact path profiles.

    Args:
        profiles: exact histograms, as produced by `compute_path_profiles`.
        in_degrees: optional true in-degree per label; prunes decompositions.
        out_degrees: optional true out-degree per label; steers the placement
            of ambiguous edges (never used to justify an exact edge).
        search_budget: DFS step limit per node; on exhaustion the node is
            reported in `unresolved` instead of guessing.
        solution_cap: stop enumerating alternatives beyond this many; the
            node's edges are then at best tier-ambiguous.

    Edges labeled exact are present in every consistent decomposition, so a
    sound input can never produce a false exact edge.
    """
    partition = tier_partition(profiles)
    tiers = partition.tiers
    tier_vecs: list[dict[tuple[int, int], int]] = []
    for members in tiers:
        rep = profiles.rows[members[0] - 1]
        tier_vecs.append(
            {(p, l): c for p, hist in rep.items() for l, c in hist.items()}
        )
    tier_maxlen = [max((l for (_p, l) in v), default=0) for v in tier_vecs]
    search_order = sorted(
        range(len(tiers)), key=lambda t: (-tier_maxlen[t], -tiers[t][0])
    )

    seeds: list[int] = []
    edges: list[ReconstructedEdge] = []
    unresolved: list[int] = []
    ambiguous: list[int] = []
    assigned_out: dict[int, int] = {}

    for j in range(1, profiles.n + 1):
        row = profiles.rows[j - 1]
        if not row:
            raise ReconstructionError(j, "empty path profile")
        if _is_seed_row(row):
            seeds.append(j)
            continue
        target: dict[tuple[int, int], int] = {}
        for p, hist in row.items():
            for l, c in hist.items():
                if l == 0:
                    raise ReconstructionError(j, "zero-length path on a non-seed node")
                target[(p, l - 1)] = c
        avail: dict[int, int] = {}
        cand: list[int] = []
        for t in search_order:
            count = bisect_left(tiers[t], j)
            if count:
                avail[t] = count
                cand.append(t)
        solutions, complete = _decompose(
            target, cand, tier_vecs, avail, search_budget, solution_cap
        )
        if in_degrees is not None and j in in_degrees:
            solutions = [
                s for s in solutions if sum(s.values()) == in_degrees[j]
            ]
        if not solutions:
            if complete:
                raise ReconstructionError(j, "no consistent parent decomposition")
            unresolved.append(j)
            continue
        if len(solutions) > 1 or not complete:
            ambiguous.append(j)
        chosen = solutions[0]
        for t in sorted(chosen):
            k = chosen[t]
            eligible = list(tiers[t][: avail[t]])
            exact = complete and all(
                sol.get(t, 0) == len(eligible) for sol in solutions
            )
            if exact:
                targets = eligible
                confidence = CONFIDENCE_EXACT
            else:
                pool = eligible
                if out_degrees is not None:
                    open_pool = [
                        m
                        for m in pool
                        if assigned_out.get(m, 0)
                        < out_degrees.get(m, profiles.n)
                    ]
                    if len(open_pool) >= k:
                        pool = open_pool
                targets = pool[:k]
                confidence = CONFIDENCE_TIER
            for m in targets:
                edges.append(ReconstructedEdge(src=m, dst=j, confidence=confidence))
                assigned_out[m] = assigned_out.get(m, 0) + 1

    edges.sort(key=lambda e: (e.dst, e.src))
    return ReconstructedGraph(
        n=profiles.n,
        seeds=tuple(seeds),
        edges=tuple(edges),
        tiers=tiers,
        unresolved=tuple(unresolved),
        ambiguous=tuple(ambiguous),
    )


def collapse_by_tier(
    edge_pairs: Sequence[tuple[int, int]], partition: TierPartition
) -> dict[tuple[int, int], int]:
    """Multigraph over tiers: count edges between tier indices."""
    out: dict[tuple[int, int], int] = {}
    for src, dst in edge_pairs:
        key = (partition.tier_of(src), partition.tier_of(dst))
        out[key] = out.get(key, 0) + 1
    return out
