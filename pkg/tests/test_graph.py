"""Ingestion, temporal ordering, and cascade-DAG construction."""

from __future__ import annotations

import pytest

from cascadekit import (
    ActivationLog,
    FollowerGraph,
    IngestionError,
    build_cascade_graph,
    classify_seeds,
    load_activation_logs,
    load_follower_graph,
    save_activation_logs,
    save_follower_graph,
)
from cascadekit.graph import iter_story_graphs
from cascadekit.prototypes import tie_star, two_cascade_example


def test_labels_follow_timestamp_then_node_order():
    graph = FollowerGraph.from_edges([(30, 10), (20, 10)])
    log = ActivationLog.from_records("s", [(30, 2.0), (10, 1.0), (20, 2.0)])
    cg = build_cascade_graph(graph, log)
    assert cg.node_ids == (10, 20, 30)
    assert cg.label_of[30] == 3


def test_edges_need_strictly_earlier_activation():
    _graph, _log, = None, None
    graph, log = tie_star(3)
    cg = build_cascade_graph(graph, log)
    # all leaves share one timestamp: the seed feeds them, they never feed
    # each other regardless of node-id order
    assert cg.in_edges == ((), (1,), (1,), (1,))
    assert cg.seeds == (1,)


def test_simultaneous_seed_group_has_no_internal_edges():
    graph = FollowerGraph.from_edges([(2, 1), (3, 2)])
    log = ActivationLog.from_records("s", [(1, 5.0), (2, 5.0), (3, 5.0)])
    cg = build_cascade_graph(graph, log)
    assert cg.in_edges == ((), (), ())
    assert cg.seeds == (1, 2, 3)


def test_two_cascade_example_structure(two_cascade):
    _graph, _log, cg = two_cascade
    assert cg.in_edges == ((), (), (1,), (1, 2), (2,), (1, 3), (1,))
    assert cg.seeds == (1, 2)
    assert cg.out_edges[0] == (3, 4, 6, 7)
    assert cg.out_degree(2) == 2


def test_unknown_voter_becomes_isolated_seed_or_strict_error():
    graph, log = two_cascade_example()
    log2 = ActivationLog.from_records(
        "s", list(log.records) + [(999, 8.0)]
    )
    cg = build_cascade_graph(graph, log2)
    assert cg.label_of[999] in cg.seeds
    with pytest.raises(IngestionError, match="999"):
        build_cascade_graph(graph, log2, strict=True)


def test_watched_only_nodes_are_known(two_cascade):
    graph, _log, _cg = two_cascade
    assert 8 in graph.nodes and 9 in graph.nodes
    assert graph.friends_of(8) == (1,)


def test_self_loop_rejected():
    with pytest.raises(IngestionError, match="self-loop"):
        FollowerGraph.from_edges([(1, 1)])


def test_duplicate_vote_rejected():
    with pytest.raises(IngestionError, match="more than once"):
        ActivationLog.from_records("s", [(1, 1.0), (1, 2.0)])


def test_bad_timestamp_rejected():
    with pytest.raises(IngestionError):
        ActivationLog.from_records("s", [(1, float("nan"))])
    with pytest.raises(IngestionError):
        ActivationLog.from_records("s", [(1, -0.5)])


def test_classify_seeds(two_cascade):
    _graph, _log, cg = two_cascade
    assert classify_seeds(cg) == ((1, 2), ())


def test_friend_to_fan_direction():
    g1 = FollowerGraph.from_edges([(2, 1)])
    g2 = FollowerGraph.from_edges([(1, 2)], direction="friend_to_fan")
    assert g1.watches == g2.watches


def test_csv_round_trip(tmp_path, two_cascade):
    graph, log, _cg = two_cascade
    gpath = tmp_path / "graph.csv"
    vpath = tmp_path / "votes.csv"
    save_follower_graph(gpath, graph)
    save_activation_logs(vpath, [log])
    graph2 = load_follower_graph(gpath)
    logs2 = load_activation_logs(vpath)
    assert graph2.watches == graph.watches
    # node 9 is watched, so it survives; node 8 only watches and survives too
    assert graph2.nodes == graph.nodes
    assert logs2[log.story_id].records == log.records


def test_csv_errors_carry_file_and_line(tmp_path):
    p = tmp_path / "graph.csv"
    p.write_text("fan_id,friend_id\n1,2\nx,3\n")
    with pytest.raises(IngestionError, match=r"graph\.csv:3"):
        load_follower_graph(p)
    v = tmp_path / "votes.csv"
    v.write_text("story_id,node_id,timestamp\ns,1,nope\n")
    with pytest.raises(IngestionError, match=r"votes\.csv:2"):
        load_activation_logs(v)
    v.write_text("bad,header\n")
    with pytest.raises(IngestionError, match="expected header"):
        load_activation_logs(v)


def test_multi_story_files_stay_separate(tmp_path):
    v = tmp_path / "votes.csv"
    v.write_text(
        "story_id,node_id,timestamp\na,1,1.0\nb,1,4.0\na,2,2.0\nb,7,5.0\n"
    )
    logs = load_activation_logs(v)
    assert list(logs) == ["a", "b"]
    assert logs["a"].records == ((1, 1.0), (2, 2.0))
    assert logs["b"].records == ((1, 4.0), (7, 5.0))
    graph = FollowerGraph.from_edges([(2, 1), (7, 2)])
    cgs = list(iter_story_graphs(graph, logs))
    assert [cg.story_id for cg in cgs] == ["a", "b"]
    assert cgs[0].in_edges == ((), (1,))
    # node 7 watches node 2, which only activated in story "a"; that
    # activation must not leak into story "b"
    assert cgs[1].in_edges == ((), ())
