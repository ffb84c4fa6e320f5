"""
Exact cosine k-nearest-neighbour index over node and walk vectors.
"""
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from src.exceptions import DimensionMismatchError, IndexEntryNotFoundError, UnknownOwnerError
from src.index.embedders import Embedder
from src.verbalizer.cache import VerbalizedWalk


class VectorKind(str, Enum):
    NODE = "node"
    WALK = "walk"


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return float(min(1.0, max(-1.0, np.dot(a, b) / (norm_a * norm_b))))


def node_representation(v: str, verbalized: Sequence[VerbalizedWalk], e: Embedder) -> np.ndarray:
    """
    Global node vector: the embedding of the node's walk texts, sorted and
    joined by newlines. A node without verbalized walks gets the zero vector.
    """
    if not verbalized:
        return np.zeros(e.dimension, dtype=np.float32)
    return e.embed("\n".join(sorted(w.text for w in verbalized)))


def top_k(scored: Iterable[Tuple[str, float]], k: int) -> List[Tuple[str, float]]:
    """Highest similarity first, ties broken by ascending id."""
    return sorted(scored, key=lambda item: (-item[1], item[0]))[:k]


class EmbeddingIndex:
    """Vectors for nodes and for walks; every walk is owned by a node."""

    def __init__(self, dimension: int, embedder_id: str = ""):
        self.dimension = dimension
        self.embedder_id = embedder_id
        self.node_vectors: Dict[str, np.ndarray] = {}
        self.walk_vectors: Dict[str, Tuple[np.ndarray, str]] = {}
        self._owned: Dict[str, Set[str]] = {}

    def __len__(self) -> int:
        return len(self.node_vectors) + len(self.walk_vectors)

    def __repr__(self) -> str:
        return (
            f"EmbeddingIndex(dimension={self.dimension}, "
            f"nodes={len(self.node_vectors)}, walks={len(self.walk_vectors)})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingIndex):
            return NotImplemented
        if (self.dimension, self.embedder_id) != (other.dimension, other.embedder_id):
            return False
        if self.node_vectors.keys() != other.node_vectors.keys():
            return False
        if self.walk_vectors.keys() != other.walk_vectors.keys():
            return False
        for key, vector in self.node_vectors.items():
            if not np.array_equal(vector, other.node_vectors[key]):
                return False
        for key, (vector, owner) in self.walk_vectors.items():
            other_vector, other_owner = other.walk_vectors[key]
            if owner != other_owner or not np.array_equal(vector, other_vector):
                return False
        return True

    def copy(self) -> "EmbeddingIndex":
        clone = EmbeddingIndex(self.dimension, self.embedder_id)
        clone.node_vectors = dict(self.node_vectors)
        clone.walk_vectors = dict(self.walk_vectors)
        clone._owned = {node: set(keys) for node, keys in self._owned.items()}
        return clone

    def _check(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector, dtype=np.float32)
        if vector.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"expected dimension {self.dimension}, got {vector.shape}"
            )
        vector = vector.copy()
        vector.setflags(write=False)
        return vector

    def walks_of(self, node: str) -> Set[str]:
        return set(self._owned.get(node, ()))

    def upsert(
        self, id: str, vector: np.ndarray, kind: VectorKind, owner: Optional[str] = None
    ) -> None:
        vector = self._check(vector)
        if VectorKind(kind) is VectorKind.NODE:
            self.node_vectors[id] = vector
            self._owned.setdefault(id, set())
            return
        if owner not in self.node_vectors:
            raise UnknownOwnerError(owner)
        previous = self.walk_vectors.get(id)
        if previous is not None and previous[1] != owner:
            self._owned[previous[1]].discard(id)
        self.walk_vectors[id] = (vector, owner)
        self._owned[owner].add(id)

    def remove(self, id: str, kind: Optional[VectorKind] = None) -> None:
        """Remove a node (with its walks) or a walk."""
        if kind in (None, VectorKind.NODE) and id in self.node_vectors:
            for key in self._owned.pop(id, set()):
                del self.walk_vectors[key]
            del self.node_vectors[id]
        elif kind in (None, VectorKind.WALK) and id in self.walk_vectors:
            _, owner = self.walk_vectors.pop(id)
            self._owned[owner].discard(id)
        else:
            raise IndexEntryNotFoundError(id)

    def knn(
        self, query: np.ndarray, k: int, kind: VectorKind, owner: Optional[str] = None
    ) -> List[Tuple[str, float]]:
        """
        Exact top-k by cosine similarity.

        Args:
            query: Query vector of the index dimension.
            k: Number of results (>= 1).
            kind: Search node vectors or walk vectors.
            owner: Restrict a walk search to the walks of this node.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        query = np.asarray(query, dtype=np.float32)
        if query.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"expected dimension {self.dimension}, got {query.shape}"
            )
        if VectorKind(kind) is VectorKind.NODE:
            candidates = self.node_vectors.items()
        elif owner is not None:
            candidates = ((key, self.walk_vectors[key][0]) for key in self._owned.get(owner, ()))
        else:
            candidates = ((key, vector) for key, (vector, _) in self.walk_vectors.items())
        return top_k(((key, cosine(query, vector)) for key, vector in candidates), k)


def index_upsert(
    idx: EmbeddingIndex, id: str, vector: np.ndarray, kind: VectorKind, owner: Optional[str] = None
) -> EmbeddingIndex:
    idx.upsert(id, vector, kind, owner)
    return idx


def index_remove(idx: EmbeddingIndex, id: str) -> EmbeddingIndex:
    idx.remove(id)
    return idx


def knn(
    idx: EmbeddingIndex, query: np.ndarray, k: int, kind: VectorKind
) -> List[Tuple[str, float]]:
    return idx.knn(query, k, kind)
