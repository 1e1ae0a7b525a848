"""Brute-force verifiers and synthetic instance generators.

Everything here is deliberately independent of the engine: paths are
enumerated one by one, reachability is a plain BFS, and the generator keeps
its own ground-truth DAG while simulating, so engine results can be checked
against first principles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import EnumerationBoundError
from .graph import ActivationLog, CascadeGraph, FollowerGraph

DEFAULT_NODE_BOUND = 50


def enumerate_paths(
    cg: CascadeGraph, seed_label: int, *, node_bound: int = DEFAULT_NODE_BOUND
) -> dict[int, dict[int, int]]:
    """Per-node histogram of active path lengths from one seed, by walking
    every path individually.

    Returns {label: {length: count}}; the seed reports {0: 1}. Exponential
    in the worst case by design, hence the node bound.
    """
    if cg.n > node_bound:
        raise EnumerationBoundError(
            f"graph has {cg.n} nodes, enumeration bound is {node_bound}"
        )
    if seed_label not in cg.seeds:
        raise ValueError(f"label {seed_label} is not a seed")
    out_edges = cg.out_edges
    hist: dict[int, dict[int, int]] = {}

    def walk(label: int, depth: int) -> None:
        h = hist.setdefault(label, {})
        h[depth] = h.get(depth, 0) + 1
        for nxt in out_edges[label - 1]:
            walk(nxt, depth + 1)

    walk(seed_label, 0)
    return hist


def reachable_from(cg: CascadeGraph, seed_label: int) -> frozenset[int]:
    """BFS over active edges from a seed; includes the seed itself."""
    seen = {seed_label}
    frontier = [seed_label]
    while frontier:
        nxt: list[int] = []
        for label in frontier:
            for dst in cg.out_edges[label - 1]:
                if dst not in seen:
                    seen.add(dst)
                    nxt.append(dst)
        frontier = nxt
    return frozenset(seen)


def longest_path_length(
    cg: CascadeGraph, *, node_bound: int = DEFAULT_NODE_BOUND
) -> int:
    """Length of the longest active path, found by exhaustive enumeration."""
    best = 0
    for seed in cg.seeds:
        for h in enumerate_paths(cg, seed, node_bound=node_bound).values():
            longest = max(h)
            if longest > best:
                best = longest
    return best


# ---------------------------------------------------------------------------
# Synthetic instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one simulated story.

    degree_model "fixed" gives every node exactly max_degree watch targets
    (capped by availability); "random" draws each node's count uniformly
    from 0..max_degree.
    """

    nodes: int
    max_degree: int = 4
    degree_model: str = "random"
    seeds: int = 1
    transmission: float = 0.5
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.nodes < 1:
            raise ValueError("nodes must be positive")
        if self.max_degree < 0:
            raise ValueError("max_degree must be non-negative")
        if self.degree_model not in ("fixed", "random"):
            raise ValueError(f"unknown degree model {self.degree_model!r}")
        if not (1 <= self.seeds <= self.nodes):
            raise ValueError("seeds must be between 1 and the node count")
        if not (0.0 <= self.transmission <= 1.0):
            raise ValueError("transmission must be a probability")


@dataclass(frozen=True)
class GeneratedInstance:
    graph: FollowerGraph
    log: ActivationLog
    truth: CascadeGraph


def generate(spec: SyntheticSpec, *, story_id: str | None = None) -> GeneratedInstance:
    """Simulate one story on a random watch network.

    Infection spreads along watch edges: when a friend activates, each of
    its fans independently activates in the next round with the recipe's
    transmission probability. The ground-truth DAG (an edge from every
    earlier-activated friend) is recorded during the simulation itself.
    """
    rng = random.Random(spec.rng_seed)
    story = story_id or f"synthetic-{spec.rng_seed}"
    ids = list(range(1, spec.nodes + 1))
    rng.shuffle(ids)

    watches: dict[int, list[int]] = {}
    edges: list[tuple[int, int]] = []
    for v in ids:
        others = [u for u in ids if u != v]
        cap = min(spec.max_degree, len(others))
        want = cap if spec.degree_model == "fixed" else rng.randint(0, cap)
        friends = rng.sample(others, want) if want else []
        watches[v] = friends
        edges.extend((v, f) for f in friends)
    graph = FollowerGraph.from_edges(edges, nodes=ids)
    fans: dict[int, list[int]] = {}
    for v, friends in watches.items():
        for f in friends:
            fans.setdefault(f, []).append(v)

    planned = rng.sample(ids, spec.seeds)
    pending: dict[int, list[int]] = {}
    for s in planned:
        pending.setdefault(rng.randint(0, 2 * spec.seeds), []).append(s)

    activated_at: dict[int, float] = {}
    records: list[tuple[int, float]] = []
    truth_in_edges: list[tuple[int, ...]] = []
    label_by_node: dict[int, int] = {}
    clock = 0.0
    rounds = sorted(pending)
    r = rounds[0]
    horizon = max(rounds)
    while r <= horizon:
        batch = pending.pop(r, [])
        rng.shuffle(batch)
        for v in batch:
            if v in activated_at:
                continue
            clock += 1.0
            activated_at[v] = clock
            preds = sorted(
                label_by_node[f] for f in watches.get(v, ()) if f in label_by_node
            )
            records.append((v, clock))
            truth_in_edges.append(tuple(preds))
            label_by_node[v] = len(records)
            for fan in fans.get(v, ()):
                if fan not in activated_at and rng.random() < spec.transmission:
                    pending.setdefault(r + 1, []).append(fan)
                    if r + 1 > horizon:
                        horizon = r + 1
        r += 1

    truth = CascadeGraph(
        story_id=story,
        node_ids=tuple(n for n, _t in records),
        timestamps=tuple(t for _n, t in records),
        in_edges=tuple(truth_in_edges),
        seeds=tuple(
            k + 1 for k, preds in enumerate(truth_in_edges) if not preds
        ),
    )
    log = ActivationLog.from_records(story, records)
    return GeneratedInstance(graph=graph, log=log, truth=truth)


def generate_corpus(
    spec: SyntheticSpec, stories: int
) -> tuple[FollowerGraph, dict[str, ActivationLog], dict[str, CascadeGraph]]:
    """Simulate several stories over one shared watch network.

    Story i reruns the recipe with rng_seed + i for its activation dynamics,
    reusing the first story's network so the corpus looks like one site.
    """
    if stories < 1:
        raise ValueError("stories must be positive")
    base = generate(spec, story_id=f"synthetic-{spec.rng_seed}-000")
    graph = base.graph
    logs = {base.log.story_id: base.log}
    truths = {base.truth.story_id: base.truth}
    for i in range(1, stories):
        story = f"synthetic-{spec.rng_seed}-{i:03d}"
        inst = _replay_on(graph, spec, spec.rng_seed + i, story)
        logs[story] = inst.log
        truths[story] = inst.truth
    return graph, logs, truths


def _replay_on(
    graph: FollowerGraph, spec: SyntheticSpec, seed: int, story: str
) -> GeneratedInstance:
    rng = random.Random(seed)
    ids = sorted(graph.nodes)
    fans = graph.fans_of()
    planned = rng.sample(ids, min(spec.seeds, len(ids)))
    pending: dict[int, list[int]] = {}
    for s in planned:
        pending.setdefault(rng.randint(0, 2 * spec.seeds), []).append(s)
    activated_at: dict[int, float] = {}
    records: list[tuple[int, float]] = []
    truth_in_edges: list[tuple[int, ...]] = []
    label_by_node: dict[int, int] = {}
    clock = 0.0
    rounds = sorted(pending)
    r = rounds[0]
    horizon = max(rounds)
    while r <= horizon:
        batch = pending.pop(r, [])
        rng.shuffle(batch)
        for v in batch:
            if v in activated_at:
                continue
            clock += 1.0
            activated_at[v] = clock
            preds = sorted(
                label_by_node[f]
                for f in graph.friends_of(v)
                if f in label_by_node
            )
            records.append((v, clock))
            truth_in_edges.append(tuple(preds))
            label_by_node[v] = len(records)
            for fan in fans.get(v, ()):
                if fan not in activated_at and rng.random() < spec.transmission:
                    pending.setdefault(r + 1, []).append(fan)
                    if r + 1 > horizon:
                        horizon = r + 1
        r += 1
    truth = CascadeGraph(
        story_id=story,
        node_ids=tuple(n for n, _t in records),
        timestamps=tuple(t for _n, t in records),
        in_edges=tuple(truth_in_edges),
        seeds=tuple(k + 1 for k, preds in enumerate(truth_in_edges) if not preds),
    )
    return GeneratedInstance(
        graph=graph, log=ActivationLog.from_records(story, records), truth=truth
    )


def synthetic_cascade_graph(
    n: int, max_in_degree: int, num_seeds: int, rng: random.Random
) -> CascadeGraph:
    """Directly build a random activation DAG of exactly n labels.

    Useful for engine-scale benchmarks where simulating a network first
    would dominate the cost. Seed labels are 1 plus a random sample; every
    other label draws min(max_in_degree, i - 1) distinct earlier parents.
    """
    if n < 1:
        raise ValueError("n must be positive")
    num_seeds = max(1, min(num_seeds, n))
    seed_set = {1}
    if num_seeds > 1:
        seed_set.update(rng.sample(range(2, n + 1), num_seeds - 1))
    in_edges: list[tuple[int, ...]] = []
    for i in range(1, n + 1):
        if i in seed_set:
            in_edges.append(())
            continue
        k = min(max_in_degree, i - 1)
        preds = rng.sample(range(1, i), k) if k else []
        if not preds:
            seed_set.add(i)
        in_edges.append(tuple(sorted(preds)))
    return CascadeGraph(
        story_id=f"bench-{n}",
        node_ids=tuple(range(1, n + 1)),
        timestamps=tuple(float(i) for i in range(1, n + 1)),
        in_edges=tuple(in_edges),
        seeds=tuple(sorted(seed_set)),
    )
