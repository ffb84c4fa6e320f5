"""
Directed labeled multigraph with mirrored forward/reverse adjacency.

Nodes and relations are plain label strings. Exact duplicate triples are
stored once; parallel edges with different relations are kept.
"""
from __future__ import annotations

import hashlib
from bisect import bisect_left, insort
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Set, Tuple, Union

import structlog

from src.exceptions import EdgeNotFoundError, NodeNotFoundError

logger = structlog.get_logger(__name__)

NodeId = str
RelationId = str
Edge = Tuple[NodeId, RelationId, NodeId]
Step = Tuple[RelationId, NodeId]

_MASK64 = (1 << 64) - 1
INVERSE_SUFFIX = "_inv"


def _digest64(*parts: str) -> int:
    payload = "\x00".join(parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _node_hash(node: NodeId) -> int:
    return _digest64("n", node)


def _edge_hash(edge: Edge) -> int:
    return _digest64("e", *edge)


class Graph:
    """
    Knowledge graph G = (V, E, R).

    Mutation goes through ``apply_update``/``apply_updates``, which work on a
    copy; the ``add_*``/``remove_*`` methods are meant for construction.
    """

    def __init__(self, edges: Iterable[Edge] = (), nodes: Iterable[NodeId] = ()):
        self.nodes: Set[NodeId] = set()
        self.edges: Set[Edge] = set()
        self.forward_adj: Dict[NodeId, List[Step]] = {}
        self.reverse_adj: Dict[NodeId, List[Step]] = {}
        self._relation_counts: Counter = Counter()
        for node in nodes:
            self.add_node(node)
        for head, relation, tail in edges:
            self.add_edge(head, relation, tail)

    @property
    def relations(self) -> Set[RelationId]:
        return set(self._relation_counts)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __contains__(self, node: object) -> bool:
        return node in self.nodes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __repr__(self) -> str:
        return f"Graph(nodes={self.num_nodes}, edges={self.num_edges})"

    def copy(self) -> "Graph":
        clone = Graph()
        clone.nodes = set(self.nodes)
        clone.edges = set(self.edges)
        clone.forward_adj = {v: list(steps) for v, steps in self.forward_adj.items()}
        clone.reverse_adj = {v: list(steps) for v, steps in self.reverse_adj.items()}
        clone._relation_counts = Counter(self._relation_counts)
        return clone

    # Construction

    def add_node(self, node: NodeId) -> bool:
        if node in self.nodes:
            return False
        self.nodes.add(node)
        self.forward_adj[node] = []
        self.reverse_adj[node] = []
        return True

    def add_edge(self, head: NodeId, relation: RelationId, tail: NodeId) -> bool:
        edge = (head, relation, tail)
        if edge in self.edges:
            return False
        self.add_node(head)
        self.add_node(tail)
        self.edges.add(edge)
        self._relation_counts[relation] += 1
        insort(self.forward_adj[head], (relation, tail))
        insort(self.reverse_adj[tail], (relation, head))
        return True

    def remove_edge(self, head: NodeId, relation: RelationId, tail: NodeId) -> None:
        edge = (head, relation, tail)
        if edge not in self.edges:
            raise EdgeNotFoundError(edge)
        self.edges.remove(edge)
        self._relation_counts[relation] -= 1
        if not self._relation_counts[relation]:
            del self._relation_counts[relation]
        _remove_sorted(self.forward_adj[head], (relation, tail))
        _remove_sorted(self.reverse_adj[tail], (relation, head))

    def remove_node(self, node: NodeId) -> List[Edge]:
        """Remove ``node`` and every incident edge; returns the removed edges."""
        if node not in self.nodes:
            raise NodeNotFoundError(node)
        incident = {(node, r, t) for r, t in self.forward_adj[node]}
        incident.update((h, r, node) for r, h in self.reverse_adj[node])
        for edge in sorted(incident):
            self.remove_edge(*edge)
        self.nodes.remove(node)
        del self.forward_adj[node]
        del self.reverse_adj[node]
        return sorted(incident)

    # Queries

    def neighbors(self, node: NodeId) -> List[Step]:
        """Outgoing (relation, target) pairs sorted by relation, then target."""
        try:
            return list(self.forward_adj[node])
        except KeyError:
            raise NodeNotFoundError(node) from None

    def predecessors(self, node: NodeId) -> List[Step]:
        """Incoming (relation, source) pairs sorted by relation, then source."""
        try:
            return list(self.reverse_adj[node])
        except KeyError:
            raise NodeNotFoundError(node) from None

    def fingerprint(self) -> str:
        return graph_fingerprint(self)


def _remove_sorted(items: List[Step], item: Step) -> None:
    pos = bisect_left(items, item)
    if pos < len(items) and items[pos] == item:
        del items[pos]
    else:  # pragma: no cover - adjacency mirrors are kept in sync
        raise AssertionError(f"adjacency mirror out of sync for {item}")


def neighbors(g: Graph, v: NodeId) -> List[Step]:
    """N(v) as (relation, target) pairs in deterministic order."""
    return g.neighbors(v)


def graph_fingerprint(g: Graph) -> str:
    """Order-independent content hash of the node and edge sets."""
    total = sum(_node_hash(v) for v in g.nodes) + sum(_edge_hash(e) for e in g.edges)
    return f"{total & _MASK64:016x}"


class UpdateKind(str, Enum):
    ADD_EDGE = "add_edge"
    REMOVE_EDGE = "remove_edge"
    ADD_NODE = "add_node"
    REMOVE_NODE = "remove_node"


@dataclass(frozen=True)
class GraphUpdate:
    """One graph mutation; payload is an edge triple or a node label."""

    kind: UpdateKind
    payload: Union[Edge, NodeId]

    @classmethod
    def add_edge(cls, head: NodeId, relation: RelationId, tail: NodeId) -> "GraphUpdate":
        return cls(UpdateKind.ADD_EDGE, (head, relation, tail))

    @classmethod
    def remove_edge(cls, head: NodeId, relation: RelationId, tail: NodeId) -> "GraphUpdate":
        return cls(UpdateKind.REMOVE_EDGE, (head, relation, tail))

    @classmethod
    def add_node(cls, node: NodeId) -> "GraphUpdate":
        return cls(UpdateKind.ADD_NODE, node)

    @classmethod
    def remove_node(cls, node: NodeId) -> "GraphUpdate":
        return cls(UpdateKind.REMOVE_NODE, node)


@dataclass
class ChangeSet:
    """Net effect of one or more updates on a graph."""

    added_nodes: Set[NodeId] = field(default_factory=set)
    removed_nodes: Set[NodeId] = field(default_factory=set)
    added_edges: Set[Edge] = field(default_factory=set)
    removed_edges: Set[Edge] = field(default_factory=set)
    # Nodes whose forward or reverse adjacency changed.
    touched_nodes: Set[NodeId] = field(default_factory=set)

    @property
    def nodes(self) -> Set[NodeId]:
        return self.touched_nodes | self.added_nodes | self.removed_nodes

    @property
    def edges(self) -> Set[Edge]:
        return self.added_edges | self.removed_edges

    def as_set(self) -> Set[Union[NodeId, Edge]]:
        return set(self.nodes) | set(self.edges)

    def is_empty(self) -> bool:
        return not (self.nodes or self.edges)

    def __bool__(self) -> bool:
        return not self.is_empty()

    def merge(self, later: "ChangeSet") -> "ChangeSet":
        """Compose this change with one applied after it."""
        merged = ChangeSet(
            added_nodes=set(self.added_nodes),
            removed_nodes=set(self.removed_nodes),
            added_edges=set(self.added_edges),
            removed_edges=set(self.removed_edges),
            touched_nodes=self.touched_nodes | later.touched_nodes,
        )
        _net(merged.added_edges, merged.removed_edges, later.added_edges, later.removed_edges)
        _net(merged.added_nodes, merged.removed_nodes, later.added_nodes, later.removed_nodes)
        return merged

    def prior_fingerprint(self, after: str) -> str:
        """Fingerprint of the graph before this change, given the one after it."""
        total = int(after, 16)
        total -= sum(_node_hash(v) for v in self.added_nodes)
        total -= sum(_edge_hash(e) for e in self.added_edges)
        total += sum(_node_hash(v) for v in self.removed_nodes)
        total += sum(_edge_hash(e) for e in self.removed_edges)
        return f"{total & _MASK64:016x}"


def _net(added: set, removed: set, later_added: set, later_removed: set) -> None:
    for item in later_added:
        if item in removed:
            removed.discard(item)
        else:
            added.add(item)
    for item in later_removed:
        if item in added:
            added.discard(item)
        else:
            removed.add(item)


def _apply_in_place(g: Graph, u: GraphUpdate) -> ChangeSet:
    change = ChangeSet()
    if u.kind is UpdateKind.ADD_EDGE:
        head, relation, tail = u.payload
        new_nodes = {v for v in (head, tail) if v not in g.nodes}
        if g.add_edge(head, relation, tail):
            change.added_nodes |= new_nodes
            change.added_edges.add(u.payload)
            change.touched_nodes |= {head, tail}
    elif u.kind is UpdateKind.REMOVE_EDGE:
        g.remove_edge(*u.payload)
        change.removed_edges.add(u.payload)
        change.touched_nodes |= {u.payload[0], u.payload[2]}
    elif u.kind is UpdateKind.ADD_NODE:
        if g.add_node(u.payload):
            change.added_nodes.add(u.payload)
            change.touched_nodes.add(u.payload)
    elif u.kind is UpdateKind.REMOVE_NODE:
        removed = g.remove_node(u.payload)
        change.removed_nodes.add(u.payload)
        change.removed_edges.update(removed)
        change.touched_nodes.add(u.payload)
        for head, _, tail in removed:
            change.touched_nodes |= {head, tail}
    else:  # pragma: no cover
        raise ValueError(f"unknown update kind: {u.kind}")
    return change


def apply_updates(g: Graph, updates: Iterable[GraphUpdate]) -> Tuple[Graph, ChangeSet]:
    """Apply ``updates`` in order to a copy of ``g``; ``g`` is left untouched."""
    result = g.copy()
    change = ChangeSet()
    count = 0
    for update in updates:
        change = change.merge(_apply_in_place(result, update))
        count += 1
    logger.debug(
        "graph_updated",
        updates=count,
        touched_nodes=len(change.touched_nodes),
        added_edges=len(change.added_edges),
        removed_edges=len(change.removed_edges),
    )
    return result, change


def apply_update(g: Graph, u: GraphUpdate) -> Tuple[Graph, ChangeSet]:
    return apply_updates(g, [u])


def reverse_reachable(
    g: Graph,
    targets: Iterable[NodeId],
    hops: int,
    extra_edges: Iterable[Edge] = (),
) -> Set[NodeId]:
    """
    Nodes with a directed path of length <= ``hops`` into ``targets``.

    Args:
        g: Graph to search.
        targets: Target nodes; unknown labels only contribute themselves when
            they are endpoints of ``extra_edges``.
        hops: Maximum path length (0 returns the known targets).
        extra_edges: Edges treated as present in addition to ``g.edges``.

    Returns:
        Set of ancestors within ``hops``, targets included.
    """
    if hops < 0:
        raise ValueError("hops must be >= 0")

    extra_reverse: Dict[NodeId, List[NodeId]] = {}
    extra_nodes: Set[NodeId] = set()
    for head, _, tail in extra_edges:
        extra_reverse.setdefault(tail, []).append(head)
        extra_nodes |= {head, tail}

    seen: Set[NodeId] = {t for t in targets if t in g.nodes or t in extra_nodes}
    frontier = deque((t, 0) for t in sorted(seen))

    while frontier:
        node, dist = frontier.popleft()
        if dist == hops:
            continue
        parents = [h for _, h in g.predecessors(node)] if node in g.nodes else []
        parents.extend(extra_reverse.get(node, ()))
        for parent in parents:
            if parent not in seen:
                seen.add(parent)
                frontier.append((parent, dist + 1))
    return seen


def with_inverse_edges(g: Graph) -> Graph:
    """Copy of ``g`` where every (h, r, t) also has (t, r + "_inv", h)."""
    result = g.copy()
    for head, relation, tail in sorted(g.edges):
        result.add_edge(tail, relation + INVERSE_SUFFIX, head)
    return result


def diff_graphs(before: Graph, after: Graph) -> ChangeSet:
    """ChangeSet that turns ``before`` into ``after``."""
    change = ChangeSet(
        added_nodes=after.nodes - before.nodes,
        removed_nodes=before.nodes - after.nodes,
        added_edges=after.edges - before.edges,
        removed_edges=before.edges - after.edges,
    )
    change.touched_nodes = change.added_nodes | change.removed_nodes
    for head, _, tail in change.edges:
        change.touched_nodes |= {head, tail}
    return change
