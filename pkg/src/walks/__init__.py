"""
Walk corpus generation and incremental maintenance.
"""
from src.walks.corpus import (
    Corpus,
    CorpusStatistics,
    Traversal,
    Walk,
    WalkConfig,
    corpus_statistics,
    dump_corpus,
    load_corpus,
    walk_key,
)
from src.walks.incremental import affected_roots, incremental_update, regenerate_roots
from src.walks.walker import (
    bfs_layers,
    bfs_tree_walks,
    generate_bfs_corpus,
    generate_corpus,
    generate_rw_corpus,
    random_walk,
    root_walks,
)

__all__ = [
    "Corpus",
    "CorpusStatistics",
    "Traversal",
    "Walk",
    "WalkConfig",
    "affected_roots",
    "bfs_layers",
    "bfs_tree_walks",
    "corpus_statistics",
    "dump_corpus",
    "generate_bfs_corpus",
    "generate_corpus",
    "generate_rw_corpus",
    "incremental_update",
    "load_corpus",
    "random_walk",
    "regenerate_roots",
    "root_walks",
    "walk_key",
]
