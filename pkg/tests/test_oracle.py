"""Brute-force verifiers and synthetic generators."""

from __future__ import annotations

import random

import pytest

from cascadekit import (
    EnumerationBoundError,
    SyntheticSpec,
    build_cascade_graph,
    enumerate_paths,
    generate,
    generate_corpus,
    longest_path_length,
    reachable_from,
    synthetic_cascade_graph,
)
from cascadekit.prototypes import chain


def test_enumerated_histograms_on_two_cascade_example(two_cascade):
    _g, _l, cg = two_cascade
    hist = enumerate_paths(cg, 1)
    assert hist[1] == {0: 1}
    assert hist[6] == {1: 1, 2: 1}  # direct hop plus the detour through 3
    assert hist[4] == {1: 1}
    assert 5 not in hist  # only seed 2 reaches label 5
    assert enumerate_paths(cg, 2)[4] == {1: 1}


def test_enumerate_paths_rejects_non_seed(two_cascade):
    *_g, cg = two_cascade
    with pytest.raises(ValueError, match="not a seed"):
        enumerate_paths(cg, 3)


def test_enumeration_bound_guards_blowup():
    cg = build_cascade_graph(*chain(60))
    with pytest.raises(EnumerationBoundError, match="60"):
        enumerate_paths(cg, 1)
    assert longest_path_length(cg, node_bound=60) == 59


def test_reachability_and_longest_path(two_cascade):
    *_g, cg = two_cascade
    assert reachable_from(cg, 1) == frozenset({1, 3, 4, 6, 7})
    assert reachable_from(cg, 2) == frozenset({2, 4, 5})
    assert longest_path_length(cg) == 2


def test_generation_is_deterministic():
    spec = SyntheticSpec(nodes=40, max_degree=3, seeds=2, transmission=0.6, rng_seed=9)
    a = generate(spec)
    b = generate(spec)
    assert a.graph == b.graph
    assert a.log == b.log
    assert a.truth == b.truth


def test_generated_truth_round_trips_through_builder():
    for seed in (0, 1, 2, 3):
        spec = SyntheticSpec(
            nodes=60, max_degree=4, seeds=3, transmission=0.7, rng_seed=seed
        )
        inst = generate(spec)
        assert build_cascade_graph(inst.graph, inst.log) == inst.truth
        assert inst.truth.n == len(inst.log)


def test_fixed_degree_model_saturates_watch_lists():
    spec = SyntheticSpec(nodes=30, max_degree=5, degree_model="fixed", rng_seed=4)
    inst = generate(spec)
    for node in inst.graph.nodes:
        assert len(inst.graph.friends_of(node)) == 5


def test_spec_validation():
    with pytest.raises(ValueError, match="nodes"):
        SyntheticSpec(nodes=0)
    with pytest.raises(ValueError, match="degree model"):
        SyntheticSpec(nodes=5, degree_model="scale-free")
    with pytest.raises(ValueError, match="seeds"):
        SyntheticSpec(nodes=5, seeds=6)
    with pytest.raises(ValueError, match="probability"):
        SyntheticSpec(nodes=5, transmission=1.5)
    with pytest.raises(ValueError, match="stories"):
        generate_corpus(SyntheticSpec(nodes=5), 0)


def test_corpus_shares_one_network():
    spec = SyntheticSpec(nodes=50, max_degree=4, seeds=2, transmission=0.8, rng_seed=6)
    graph, logs, truths = generate_corpus(spec, 4)
    assert sorted(logs) == [f"synthetic-6-{i:03d}" for i in range(4)]
    assert sorted(logs) == sorted(truths)
    assert len({tuple(sorted(log.records)) for log in logs.values()}) > 1
    for story, log in logs.items():
        assert build_cascade_graph(graph, log) == truths[story]
        assert truths[story].story_id == story


def test_synthetic_cascade_graph_shape():
    rng = random.Random(12)
    cg = synthetic_cascade_graph(50, 3, 4, rng)
    assert cg.n == 50
    assert len(cg.seeds) == 4
    assert 1 in cg.seeds
    for i, preds in enumerate(cg.in_edges, 1):
        assert all(p < i for p in preds)
        assert len(preds) <= 3
        assert preds == tuple(sorted(preds))
        assert (preds == ()) == (i in cg.seeds)
