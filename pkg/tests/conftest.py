"""Shared fixtures: canonical small cascades and a synthetic CLI corpus."""

from __future__ import annotations

import pytest

from cascadekit import build_cascade_graph, compute_path_profiles
from cascadekit.prototypes import chain, clique, star, two_cascade_example


@pytest.fixture(scope="session")
def two_cascade():
    """The seven-node, two-seed example: (follower graph, log, DAG)."""
    graph, log = two_cascade_example()
    return graph, log, build_cascade_graph(graph, log)


@pytest.fixture(scope="session")
def two_cascade_profiles(two_cascade):
    _graph, _log, cg = two_cascade
    return compute_path_profiles(cg)


@pytest.fixture(scope="session")
def chain_graph():
    graph, log = chain(6)
    return build_cascade_graph(graph, log)


@pytest.fixture(scope="session")
def star_graph():
    graph, log = star(5)
    return build_cascade_graph(graph, log)


@pytest.fixture(scope="session")
def clique_graph():
    graph, log = clique(6)
    return build_cascade_graph(graph, log)


@pytest.fixture(scope="session")
def cli_corpus(tmp_path_factory):
    """A small generated corpus on disk for CLI tests."""
    from cascadekit.cli import main

    out = tmp_path_factory.mktemp("corpus")
    rc = main(
        [
            "generate",
            "--out", str(out),
            "--nodes", "120",
            "--stories", "5",
            "--seeds", "2",
            "--transmission", "0.7",
            "--max-degree", "4",
            "--seed", "13",
        ]
    )
    assert rc == 0
    return out
