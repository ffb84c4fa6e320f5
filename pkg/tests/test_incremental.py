import random

import pytest

from conftest import random_graph, random_updates
from src.exceptions import StaleCorpusError
from src.kg.graph import Graph, GraphUpdate, apply_update, apply_updates
from src.walks.corpus import Traversal, WalkConfig
from src.walks.incremental import affected_roots, incremental_update
from src.walks.walker import generate_corpus

CHAIN = Graph([("a", "r", "b"), ("b", "r", "c")])


def test_affected_roots_respect_depth():
    after, changed = apply_update(CHAIN, GraphUpdate.add_edge("c", "r", "d"))
    shallow = generate_corpus(CHAIN, WalkConfig(depth=1))
    deep = generate_corpus(CHAIN, WalkConfig(depth=2))
    assert affected_roots(after, shallow, changed) == {"b", "c", "d"}
    assert affected_roots(after, deep, changed) == {"a", "b", "c", "d"}


def test_removed_edge_still_reaches_upstream_roots():
    after, changed = apply_update(CHAIN, GraphUpdate.remove_edge("b", "r", "c"))
    corpus = generate_corpus(CHAIN, WalkConfig(depth=2))
    assert affected_roots(after, corpus, changed) == {"a", "b", "c"}


def test_empty_change_recomputes_nothing():
    corpus = generate_corpus(CHAIN, WalkConfig(depth=2))
    after, changed = apply_updates(CHAIN, [])
    assert affected_roots(after, corpus, changed) == set()
    assert incremental_update(after, corpus, changed) == corpus


def test_removed_root_disappears():
    corpus = generate_corpus(CHAIN, WalkConfig(depth=2))
    after, changed = apply_update(CHAIN, GraphUpdate.remove_node("a"))
    updated = incremental_update(after, corpus, changed)
    assert "a" not in updated.walks
    assert not any(key.startswith('["a"') for key in updated.multiplicity)


def test_stale_corpus_is_rejected():
    corpus = generate_corpus(Graph([("x", "r", "y")]), WalkConfig(depth=2))
    after, changed = apply_update(CHAIN, GraphUpdate.add_node("d"))
    with pytest.raises(StaleCorpusError):
        incremental_update(after, corpus, changed)


def test_second_update_with_first_change_is_stale():
    corpus = generate_corpus(CHAIN, WalkConfig(depth=2))
    middle, first = apply_update(CHAIN, GraphUpdate.add_node("d"))
    after, _ = apply_update(middle, GraphUpdate.add_edge("d", "r", "a"))
    with pytest.raises(StaleCorpusError):
        incremental_update(after, corpus, first)


@pytest.mark.parametrize("traversal", [Traversal.RW, Traversal.BFS])
def test_incremental_equals_rebuild_on_random_sequences(traversal):
    rng = random.Random(17 if traversal is Traversal.RW else 29)
    for _ in range(100):
        g = random_graph(rng, 12, 30)
        cfg = WalkConfig(
            depth=rng.randint(1, 4),
            num_walks=rng.randint(1, 8),
            traversal=traversal,
            global_seed=rng.getrandbits(64),
        )
        corpus = generate_corpus(g, cfg)
        after, changed = apply_updates(g, random_updates(rng, g, rng.randint(1, 6)))
        assert incremental_update(after, corpus, changed) == generate_corpus(after, cfg)


def test_chained_updates_stay_consistent():
    rng = random.Random(41)
    g = random_graph(rng, 15, 40)
    cfg = WalkConfig(depth=3, num_walks=10, global_seed=7)
    corpus = generate_corpus(g, cfg)
    for _ in range(10):
        after, changed = apply_updates(g, random_updates(rng, g, 3))
        corpus = incremental_update(after, corpus, changed)
        g = after
    assert corpus == generate_corpus(g, cfg)
