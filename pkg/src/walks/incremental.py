"""
Corpus maintenance under graph updates.

A root's walks can only change if, within ``depth`` hops, it reaches a node
whose adjacency changed; the search runs over the post-update graph plus the
removed edges, i.e. the union of the before and after graphs.
"""
from dataclasses import replace
from typing import Iterable, Set

import structlog

from src.exceptions import StaleCorpusError
from src.kg.graph import ChangeSet, Graph, NodeId, graph_fingerprint, reverse_reachable
from src.walks.corpus import Corpus
from src.walks.walker import root_walks

logger = structlog.get_logger(__name__)


def affected_roots(g: Graph, corpus: Corpus, changed: ChangeSet) -> Set[NodeId]:
    """
    Roots whose walk set may differ after ``changed`` was applied to give ``g``.

    Raises:
        StaleCorpusError: The corpus was not built from the pre-update graph.
    """
    expected = changed.prior_fingerprint(graph_fingerprint(g))
    if expected != corpus.graph_fingerprint:
        raise StaleCorpusError(
            f"corpus fingerprint {corpus.graph_fingerprint} does not match "
            f"pre-update graph {expected}; rebuild the corpus"
        )
    if changed.is_empty():
        return set()
    roots = reverse_reachable(
        g, changed.nodes, corpus.config.depth, extra_edges=changed.removed_edges
    )
    return roots | changed.added_nodes | changed.removed_nodes


def regenerate_roots(g: Graph, corpus: Corpus, roots: Iterable[NodeId]) -> Corpus:
    """Copy of ``corpus`` with the walks of ``roots`` rebuilt against ``g``."""
    walks = dict(corpus.walks)
    multiplicity = dict(corpus.multiplicity)
    for root in roots:
        for walk in walks.pop(root, ()):
            multiplicity.pop(walk.key, None)
        if root in g.nodes:
            walks[root], counts = root_walks(g, root, corpus.config)
            multiplicity.update(counts)
    return replace(
        corpus,
        walks=walks,
        multiplicity=multiplicity,
        graph_fingerprint=graph_fingerprint(g),
    )


def incremental_update(g_after: Graph, corpus: Corpus, changed: ChangeSet) -> Corpus:
    """Regenerate only the affected roots; equals a full rebuild on ``g_after``."""
    roots = affected_roots(g_after, corpus, changed)
    updated = regenerate_roots(g_after, corpus, roots)
    logger.info(
        "corpus_incrementally_updated",
        recomputed_roots=len(roots),
        roots_total=len(updated.walks),
    )
    return updated
