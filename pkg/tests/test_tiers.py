"""Tier detection and propagation-graph reconstruction."""

from __future__ import annotations

import pytest

from cascadekit import (
    CONFIDENCE_EXACT,
    CONFIDENCE_TIER,
    ReconstructionError,
    build_cascade_graph,
    compute_path_profiles,
    reconstruct,
    tier_partition,
)
from cascadekit.tiers import collapse_by_tier
from cascadekit.prototypes import (
    ambiguous_branch_example,
    chain,
    clique,
    star,
    tie_star,
    two_cascade_example,
)


def _truth_edges(cg):
    return tuple((j, i) for i, preds in enumerate(cg.in_edges, 1) for j in preds)


def test_tier_partition_on_two_cascade_example(two_cascade_profiles):
    part = tier_partition(two_cascade_profiles)
    assert part.tiers == ((1,), (2,), (3, 7), (4,), (5,), (6,))
    assert part.tier_of(7) == part.tier_of(3)
    assert part.as_sets()[2] == frozenset({3, 7})


def test_chain_and_clique_are_all_singletons():
    for maker in (chain, clique):
        cg = build_cascade_graph(*maker(6))
        part = tier_partition(compute_path_profiles(cg))
        assert all(len(t) == 1 for t in part.tiers)


def test_star_leaves_form_one_tier():
    cg = build_cascade_graph(*star(5))
    part = tier_partition(compute_path_profiles(cg))
    assert (2, 3, 4, 5, 6) in part.tiers


def test_exact_reconstruction_of_two_cascade_example(two_cascade, two_cascade_profiles):
    _g, _l, cg = two_cascade
    recon = reconstruct(two_cascade_profiles)
    assert recon.seeds == (1, 2)
    assert recon.unresolved == ()
    assert recon.ambiguous == ()
    assert all(e.confidence == CONFIDENCE_EXACT for e in recon.edges)
    assert sorted(recon.edge_pairs()) == sorted(_truth_edges(cg))


def test_exact_reconstruction_of_prototypes():
    for maker in (chain, star, clique):
        cg = build_cascade_graph(*maker(6))
        prof = compute_path_profiles(cg)
        recon = reconstruct(prof)
        assert sorted(recon.edge_pairs()) == sorted(_truth_edges(cg))
        assert all(e.confidence == CONFIDENCE_EXACT for e in recon.edges)
        part = tier_partition(prof)
        assert collapse_by_tier(recon.edge_pairs(), part) == collapse_by_tier(
            _truth_edges(cg), part
        )


def test_chain_reconstructs_exactly_at_node_level():
    cg = build_cascade_graph(*chain(6))
    recon = reconstruct(compute_path_profiles(cg))
    assert recon.edge_pairs() == _truth_edges(cg)
    assert all(e.confidence == CONFIDENCE_EXACT for e in recon.edges)


def test_tie_star_members_are_interchangeable():
    cg = build_cascade_graph(*tie_star(3))
    prof = compute_path_profiles(cg)
    part = tier_partition(prof)
    assert (2, 3, 4) in part.tiers
    recon = reconstruct(prof)
    # all leaves hang off the seed; exact because the whole tier is used
    assert sorted(recon.edge_pairs()) == [(1, 2), (1, 3), (1, 4)]
    assert all(e.confidence == CONFIDENCE_EXACT for e in recon.edges)


def test_ambiguous_parent_is_flagged_not_asserted():
    graph, log = ambiguous_branch_example(5)
    cg = build_cascade_graph(graph, log)
    prof = compute_path_profiles(cg)
    recon = reconstruct(prof)
    late = cg.n
    parents = [(e.src, e.confidence) for e in recon.edges if e.dst == late]
    assert len(parents) == 1
    src, confidence = parents[0]
    assert confidence == CONFIDENCE_TIER
    assert 2 <= src <= 6  # some leaf; data cannot say which
    # the chosen parent tier is still the correct one
    part = tier_partition(prof)
    assert part.tier_of(src) == part.tier_of(2)
    # node-level ambiguity within one tier: the tier multiset is still unique
    assert recon.ambiguous == ()


def test_out_degree_hints_steer_ambiguous_placement():
    graph, log = ambiguous_branch_example(5)
    cg = build_cascade_graph(graph, log)
    prof = compute_path_profiles(cg)
    late = cg.n
    truth = {m: cg.out_degree(m) for m in range(1, cg.n + 1)}
    recon = reconstruct(prof, out_degrees=truth)
    parents = [e.src for e in recon.edges if e.dst == late]
    assert parents == [2]  # the only leaf with spare capacity
    assert all(
        e.confidence == CONFIDENCE_TIER for e in recon.edges if e.dst == late
    )


def test_in_degree_hints_prune_decompositions():
    graph, log = two_cascade_example()
    cg = build_cascade_graph(graph, log)
    prof = compute_path_profiles(cg)
    hints = {i: len(preds) for i, preds in enumerate(cg.in_edges, 1)}
    recon = reconstruct(prof, in_degrees=hints)
    assert sorted(recon.edge_pairs()) == sorted(_truth_edges(cg))


def test_budget_exhaustion_reports_unresolved():
    cg = build_cascade_graph(*clique(12))
    prof = compute_path_profiles(cg)
    recon = reconstruct(prof, search_budget=3)
    assert recon.unresolved  # nodes the bounded search could not decompose
    assert set(recon.unresolved) <= set(range(2, 13))


def test_inconsistent_profile_raises():
    cg = build_cascade_graph(*chain(3))
    prof = compute_path_profiles(cg)
    rows = list(prof.rows)
    rows[2] = {0: {7: 1}}  # length-7 path cannot come from any earlier node
    broken = type(prof)(seeds=prof.seeds, rows=tuple(rows))
    with pytest.raises(ReconstructionError, match="label 3"):
        reconstruct(broken)


def test_collapse_by_tier_counts(two_cascade, two_cascade_profiles):
    _g, _l, cg = two_cascade
    part = tier_partition(two_cascade_profiles)
    collapsed = collapse_by_tier(_truth_edges(cg), part)
    t1, t37 = part.tier_of(1), part.tier_of(3)
    assert collapsed[(t1, t37)] == 2  # 1->3 and 1->7
