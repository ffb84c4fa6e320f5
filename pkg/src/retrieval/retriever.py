"""
Two-stage retrieval: the k nodes closest to the query, then the k closest
verbalized walks owned by each of those nodes.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Tuple

import structlog

from src.exceptions import EmptyIndexError
from src.index.embedders import Embedder
from src.index.vector_index import EmbeddingIndex, VectorKind
from src.verbalizer.cache import VerbalizedWalk

logger = structlog.get_logger(__name__)


class RetrievedWalk(NamedTuple):
    walk_key: str
    owner: str
    similarity: float
    text: str


@dataclass
class RetrievalResult:
    """Retrieved nodes and the context walks assembled from them."""

    query_text: str
    nodes: List[Tuple[str, float]] = field(default_factory=list)
    walks: List[RetrievedWalk] = field(default_factory=list)
    k: int = 3

    @property
    def context(self) -> List[str]:
        return [walk.text for walk in self.walks]

    @property
    def walk_keys(self) -> List[str]:
        return [walk.walk_key for walk in self.walks]

    def to_records(self) -> List[Dict[str, Any]]:
        """Line-delimited trace records: retrieved nodes first, then walks."""
        records: List[Dict[str, Any]] = [
            {"record": "node", "rank": rank, "node": node, "similarity": sim}
            for rank, (node, sim) in enumerate(self.nodes, start=1)
        ]
        records.extend(
            {
                "record": "walk",
                "rank": rank,
                "walk_key": walk.walk_key,
                "owner": walk.owner,
                "similarity": walk.similarity,
                "text": walk.text,
            }
            for rank, walk in enumerate(self.walks, start=1)
        )
        return records


def retrieve(
    query_text: str,
    idx: EmbeddingIndex,
    verbal: Mapping[str, VerbalizedWalk],
    e: Embedder,
    k: int = 3,
) -> RetrievalResult:
    """
    Retrieve context for a question.

    Args:
        query_text: The question.
        idx: Node and walk vectors.
        verbal: Verbalizations keyed by walk key.
        e: Embedder used to build ``idx``.
        k: Number of nodes, and of walks per node.

    Returns:
        RetrievalResult with walks ordered by similarity, then walk key.

    Raises:
        EmptyIndexError: The index holds no node vectors.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not idx.node_vectors:
        raise EmptyIndexError("cannot retrieve from an index without node vectors")

    query = e.embed(query_text)
    nodes = idx.knn(query, k, VectorKind.NODE)

    best: Dict[str, RetrievedWalk] = {}
    for node, _ in nodes:
        for key, similarity in idx.knn(query, k, VectorKind.WALK, owner=node):
            seen = best.get(key)
            if seen is None or similarity > seen.similarity:
                best[key] = RetrievedWalk(key, node, similarity, verbal[key].text)

    walks = sorted(best.values(), key=lambda walk: (-walk.similarity, walk.walk_key))
    logger.debug("context_retrieved", nodes=len(nodes), walks=len(walks), k=k)
    return RetrievalResult(query_text=query_text, nodes=nodes, walks=walks, k=k)
