"""Canonical small cascades used by tests, docs, and regression suites.

Each helper returns a (FollowerGraph, ActivationLog) pair; node ids double
as activation labels because every log activates ids in ascending order at
integer timestamps.
"""

from __future__ import annotations

from .graph import ActivationLog, FollowerGraph


def _instance(
    story: str,
    watch_pairs: list[tuple[int, int]],
    activations: list[tuple[int, float]],
    extra_nodes: tuple[int, ...] = (),
) -> tuple[FollowerGraph, ActivationLog]:
    graph = FollowerGraph.from_edges(watch_pairs, nodes=extra_nodes)
    log = ActivationLog.from_records(story, activations)
    return graph, log


def two_cascade_example(
    *, include_inactive: bool = True
) -> tuple[FollowerGraph, ActivationLog]:
    """Seven activations and two seeds, with one node shared by both cascades.

    Activation order is node id order; the watch edges give in-edge lists
    3<-{1}, 4<-{1,2}, 5<-{2}, 6<-{1,3}, 7<-{1}, so labels 1 and 2 seed two
    overlapping cascades and labels 3 and 7 end up mutually isomorphic.
    """
    pairs = [(3, 1), (4, 1), (4, 2), (5, 2), (6, 1), (6, 3), (7, 1)]
    extra: tuple[int, ...] = ()
    if include_inactive:
        pairs.append((8, 1))  # watcher that never activates
        pairs.append((1, 9))  # watched account that never activates
        extra = (8, 9)
    log = [(i, float(i)) for i in range(1, 8)]
    return _instance("two-cascade", pairs, log, extra)


def chain(n: int = 6) -> tuple[FollowerGraph, ActivationLog]:
    """Single file of activations: node i+1 watches node i."""
    if n < 1:
        raise ValueError("chain needs at least one node")
    pairs = [(i + 1, i) for i in range(1, n)]
    log = [(i, float(i)) for i in range(1, n + 1)]
    return _instance(f"chain-{n}", pairs, log)


def star(leaves: int = 5) -> tuple[FollowerGraph, ActivationLog]:
    """One seed watched by every other node; leaves activate afterwards."""
    if leaves < 1:
        raise ValueError("star needs at least one leaf")
    pairs = [(i, 1) for i in range(2, leaves + 2)]
    log = [(i, float(i)) for i in range(1, leaves + 2)]
    return _instance(f"star-{leaves}", pairs, log)


def clique(n: int = 6) -> tuple[FollowerGraph, ActivationLog]:
    """Every node watches all earlier activations: densest single cascade."""
    if n < 1:
        raise ValueError("clique needs at least one node")
    pairs = [(i, j) for i in range(2, n + 1) for j in range(1, i)]
    log = [(i, float(i)) for i in range(1, n + 1)]
    return _instance(f"clique-{n}", pairs, log)


def tie_star(leaves: int = 3) -> tuple[FollowerGraph, ActivationLog]:
    """Star whose leaves all activate at the same instant.

    The simultaneous leaves form one tier and carry no edges among
    themselves, whatever their node-id order suggests.
    """
    if leaves < 1:
        raise ValueError("tie star needs at least one leaf")
    pairs = [(i, 1) for i in range(2, leaves + 2)]
    log = [(1, 1.0)] + [(i, 2.0) for i in range(2, leaves + 2)]
    return _instance(f"tie-star-{leaves}", pairs, log)


def ambiguous_branch_example(
    leaves: int = 5,
) -> tuple[FollowerGraph, ActivationLog]:
    """Star plus one late node fed by a single leaf.

    All leaves are isomorphic and activate before the late node, so path
    profiles alone cannot tell which leaf is its parent; reconstruction must
    flag that edge as tier-ambiguous.
    """
    if leaves < 2:
        raise ValueError("needs at least two leaves to be ambiguous")
    pairs = [(i, 1) for i in range(2, leaves + 2)]
    late = leaves + 2
    pairs.append((late, 2))
    log = [(i, float(i)) for i in range(1, late + 1)]
    return _instance(f"ambiguous-branch-{leaves}", pairs, log)
