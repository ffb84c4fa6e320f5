"""
Embeddings and the node/walk vector index.
"""
from src.index.embedders import (
    Embedder,
    HashedBowEmbedder,
    RemoteEmbedder,
    build_embedder,
    embed_hashed_bow,
    fnv1a_64,
)
from src.index.storage import dump_index, load_index
from src.index.vector_index import (
    EmbeddingIndex,
    VectorKind,
    cosine,
    index_remove,
    index_upsert,
    knn,
    node_representation,
    top_k,
)

__all__ = [
    "Embedder",
    "EmbeddingIndex",
    "HashedBowEmbedder",
    "RemoteEmbedder",
    "VectorKind",
    "build_embedder",
    "cosine",
    "dump_index",
    "embed_hashed_bow",
    "fnv1a_64",
    "index_remove",
    "index_upsert",
    "knn",
    "load_index",
    "node_representation",
    "top_k",
]
