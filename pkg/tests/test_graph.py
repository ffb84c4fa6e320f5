import random

import networkx as nx
import pytest

from conftest import random_graph, random_updates
from src.exceptions import EdgeNotFoundError, NodeNotFoundError
from src.kg.graph import (
    ChangeSet,
    Graph,
    GraphUpdate,
    apply_update,
    apply_updates,
    diff_graphs,
    graph_fingerprint,
    neighbors,
    reverse_reachable,
    with_inverse_edges,
)


def test_neighbors_of_star_center():
    g = Graph([("c", "r", f"n{i}") for i in range(1, 5)])
    assert len(neighbors(g, "c")) == 4


def test_neighbors_of_sink_is_empty():
    g = Graph([("a", "r", "b")])
    assert neighbors(g, "b") == []


def test_neighbors_keeps_parallel_relations_sorted():
    g = Graph([("a", "s", "b"), ("a", "r", "b"), ("b", "r", "a")])
    assert neighbors(g, "a") == [("r", "b"), ("s", "b")]


def test_neighbors_unknown_node():
    with pytest.raises(NodeNotFoundError):
        neighbors(Graph(), "x")


def test_predecessors_mirror_outgoing_edges():
    g = Graph([("a", "s", "c"), ("b", "r", "c"), ("a", "r", "c"), ("c", "r", "a")])
    assert g.predecessors("c") == [("r", "a"), ("r", "b"), ("s", "a")]
    assert g.predecessors("b") == []
    incoming = sorted((h, r, t) for t in g.nodes for r, h in g.predecessors(t))
    outgoing = sorted((h, r, t) for h in g.nodes for r, t in neighbors(g, h))
    assert incoming == outgoing == sorted(g.edges)
    with pytest.raises(NodeNotFoundError):
        g.predecessors("x")


def test_duplicate_triples_collapse():
    g = Graph([("a", "r", "b"), ("a", "r", "b")])
    assert g.num_edges == 1
    assert g.relations == {"r"}


def test_add_edge_to_empty_graph():
    g, changed = apply_update(Graph(), GraphUpdate.add_edge("A", "r", "B"))
    assert g.nodes == {"A", "B"}
    assert changed.as_set() == {"A", "B", ("A", "r", "B")}


def test_remove_node_drops_incident_edges():
    g = Graph([("A", "r", "B"), ("C", "s", "A"), ("B", "r", "C")])
    after, changed = apply_update(g, GraphUpdate.remove_node("A"))
    assert after.edges == {("B", "r", "C")}
    assert {"A", "B", "C"} <= changed.nodes
    assert changed.removed_edges == {("A", "r", "B"), ("C", "s", "A")}


def test_duplicate_add_edge_is_a_noop():
    g = Graph([("A", "r", "B")])
    after, changed = apply_update(g, GraphUpdate.add_edge("A", "r", "B"))
    assert after == g
    assert changed.as_set() == set()
    assert not changed


def test_apply_update_leaves_input_untouched():
    g = Graph([("A", "r", "B")])
    apply_update(g, GraphUpdate.remove_edge("A", "r", "B"))
    assert g.edges == {("A", "r", "B")}


@pytest.mark.parametrize(
    "update, error",
    [
        (GraphUpdate.remove_edge("A", "r", "Z"), EdgeNotFoundError),
        (GraphUpdate.remove_node("Z"), NodeNotFoundError),
    ],
)
def test_removing_missing_elements(update, error):
    with pytest.raises(error):
        apply_update(Graph([("A", "r", "B")]), update)


def test_add_then_remove_edge_restores_graph():
    rng = random.Random(7)
    for _ in range(50):
        g = random_graph(rng, 10, 20)
        edge = (rng.choice(sorted(g.nodes)), "fresh", rng.choice(sorted(g.nodes)))
        added, _ = apply_update(g, GraphUpdate.add_edge(*edge))
        restored, _ = apply_update(added, GraphUpdate.remove_edge(*edge))
        assert restored == g
        assert restored.forward_adj == g.forward_adj


def test_add_then_remove_edge_between_existing_nodes():
    g = Graph([("a", "r", "b")], ["c"])
    added, _ = apply_update(g, GraphUpdate.add_edge("b", "s", "c"))
    restored, _ = apply_update(added, GraphUpdate.remove_edge("b", "s", "c"))
    assert restored == g


def test_changeset_merge_is_net():
    g = Graph([("a", "r", "b")])
    after, changed = apply_updates(
        g,
        [GraphUpdate.add_edge("b", "r", "c"), GraphUpdate.remove_edge("b", "r", "c")],
    )
    assert after.edges == g.edges
    assert changed.added_edges == set()
    assert changed.removed_edges == set()
    assert changed.added_nodes == {"c"}


def test_mirror_property_on_random_graphs():
    rng = random.Random(11)
    for _ in range(100):
        g = random_graph(rng)
        rebuilt = {v: [] for v in g.nodes}
        for head in g.nodes:
            for relation, tail in g.forward_adj[head]:
                rebuilt[tail].append((relation, head))
        assert {v: sorted(steps) for v, steps in rebuilt.items()} == g.reverse_adj


def test_reverse_reachable_examples():
    chain = Graph([("a", "r", "b"), ("b", "r", "c")])
    assert reverse_reachable(chain, {"c"}, 2) == {"a", "b", "c"}
    assert reverse_reachable(chain, {"c"}, 0) == {"c"}
    diamond = Graph([("a", "r", "b"), ("b", "r", "d"), ("a", "r", "c"), ("c", "r", "d")])
    assert reverse_reachable(diamond, {"d"}, 1) == {"b", "c", "d"}
    assert reverse_reachable(chain, {"unknown"}, 3) == set()


def test_reverse_reachable_matches_ancestor_oracle():
    rng = random.Random(3)
    for _ in range(100):
        g = random_graph(rng)
        digraph = nx.DiGraph()
        digraph.add_nodes_from(g.nodes)
        digraph.add_edges_from((h, t) for h, _, t in g.edges)
        target = rng.choice(sorted(g.nodes))
        expected = nx.ancestors(digraph, target) | {target}
        assert reverse_reachable(g, {target}, g.num_nodes) == expected


def test_reverse_reachable_uses_extra_edges():
    g = Graph([("b", "r", "c")], ["a"])
    assert reverse_reachable(g, {"c"}, 2, extra_edges=[("a", "r", "b")]) == {"a", "b", "c"}


def test_fingerprint_is_order_independent():
    edges = [("a", "r", "b"), ("b", "s", "c"), ("c", "r", "a")]
    assert graph_fingerprint(Graph(edges)) == graph_fingerprint(Graph(reversed(edges)))
    assert graph_fingerprint(Graph(edges)) != graph_fingerprint(Graph(edges[:2]))


def test_prior_fingerprint_recovers_pre_update_graph():
    rng = random.Random(5)
    for _ in range(50):
        g = random_graph(rng, 10, 20)
        after, changed = apply_updates(g, random_updates(rng, g, 5))
        assert changed.prior_fingerprint(graph_fingerprint(after)) == graph_fingerprint(g)


def test_diff_graphs():
    before = Graph([("a", "r", "b")], ["z"])
    after = Graph([("a", "r", "c")])
    change = diff_graphs(before, after)
    assert change.added_edges == {("a", "r", "c")}
    assert change.removed_edges == {("a", "r", "b")}
    assert change.added_nodes == {"c"}
    assert change.removed_nodes == {"b", "z"}
    assert change.touched_nodes == {"a", "b", "c", "z"}
    assert diff_graphs(before, before) == ChangeSet()


def test_with_inverse_edges():
    g = with_inverse_edges(Graph([("a", "writtenBy", "b")]))
    assert g.edges == {("a", "writtenBy", "b"), ("b", "writtenBy_inv", "a")}
