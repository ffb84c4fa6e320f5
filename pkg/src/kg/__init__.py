"""
Knowledge-graph storage, parsing and mutation.
"""
from src.kg.graph import (
    ChangeSet,
    Edge,
    Graph,
    GraphUpdate,
    NodeId,
    RelationId,
    Step,
    UpdateKind,
    apply_update,
    apply_updates,
    diff_graphs,
    graph_fingerprint,
    neighbors,
    reverse_reachable,
    with_inverse_edges,
)
from src.kg.parsers import (
    load_graph,
    parse_ntriples,
    parse_tsv,
    parse_updates,
    serialize_ntriples,
    serialize_tsv,
)

__all__ = [
    "ChangeSet",
    "Edge",
    "Graph",
    "GraphUpdate",
    "NodeId",
    "RelationId",
    "Step",
    "UpdateKind",
    "apply_update",
    "apply_updates",
    "diff_graphs",
    "graph_fingerprint",
    "load_graph",
    "neighbors",
    "parse_ntriples",
    "parse_tsv",
    "parse_updates",
    "reverse_reachable",
    "serialize_ntriples",
    "serialize_tsv",
    "with_inverse_edges",
]
