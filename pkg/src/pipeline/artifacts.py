"""
Build, update and persist the artifact set: graph, walk corpus,
verbalizations and the embedding index.
"""
import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union

import structlog

from src.exceptions import ArtifactError, ParseError, StaleCorpusError
from src.index.embedders import Embedder
from src.index.storage import dump_index, load_index
from src.index.vector_index import EmbeddingIndex, VectorKind, node_representation
from src.kg.graph import Graph, GraphUpdate, apply_updates, diff_graphs, with_inverse_edges
from src.models.llm_client import LlmClient
from src.pipeline.config import RUN_CONFIG_FILE, RunConfig, dump_run_config, load_provenance
from src.verbalizer.cache import VerbalizationCache
from src.verbalizer.verbalizer import verbalize_corpus
from src.walks.corpus import Corpus, dump_corpus, load_corpus
from src.walks.incremental import affected_roots, regenerate_roots
from src.walks.walker import generate_corpus

logger = structlog.get_logger(__name__)

GRAPH_FILE = "graph.json"
CORPUS_FILE = "corpus.jsonl"
VERBALIZATIONS_FILE = "verbalizations.jsonl"
INDEX_FILE = "index.bin"
LOCK_FILE = ".lock"
ARTIFACT_FILES = (GRAPH_FILE, CORPUS_FILE, VERBALIZATIONS_FILE, INDEX_FILE, RUN_CONFIG_FILE)


@dataclass
class KnowledgeArtifacts:
    """Everything retrieval needs, derived from one graph."""

    graph: Graph
    corpus: Corpus
    verbalizations: VerbalizationCache
    index: EmbeddingIndex
    config: RunConfig

    @property
    def walk_graph(self) -> Graph:
        return walk_graph(self.graph, self.config.undirected)


@dataclass
class UpdateCounts:
    updates: int = 0
    recomputed_roots: int = 0
    regenerated_walks: int = 0
    dropped_walks: int = 0
    new_verbalizations: int = 0
    recomputed_vectors: int = 0


def walk_graph(g: Graph, undirected: bool) -> Graph:
    """The graph walks are generated on."""
    return with_inverse_edges(g) if undirected else g


def index_roots(
    idx: EmbeddingIndex,
    corpus: Corpus,
    verbal: VerbalizationCache,
    e: Embedder,
    roots: Iterable[str],
) -> int:
    """(Re)compute node and walk vectors of ``roots``; returns vectors written."""
    written = 0
    for root in sorted(roots):
        if root in idx.node_vectors:
            idx.remove(root, VectorKind.NODE)
        if root not in corpus.walks:
            continue
        entries = [verbal[w.key] for w in corpus.walks[root] if w.steps]
        idx.upsert(root, node_representation(root, entries, e), VectorKind.NODE)
        vectors = e.embed_many([entry.text for entry in entries]) if entries else []
        for entry, vector in zip(entries, vectors):
            idx.upsert(entry.walk_key, vector, VectorKind.WALK, owner=root)
        written += 1 + len(entries)
    return written


def build_index(corpus: Corpus, verbal: VerbalizationCache, e: Embedder) -> EmbeddingIndex:
    idx = EmbeddingIndex(e.dimension, e.identifier)
    index_roots(idx, corpus, verbal, e, corpus.walks)
    return idx


def build_artifacts(
    g: Graph,
    config: RunConfig,
    embedder: Embedder,
    client: Optional[LlmClient] = None,
) -> KnowledgeArtifacts:
    """
    Generate the corpus, verbalize it and index it.

    Args:
        g: Knowledge graph as loaded.
        config: Run configuration.
        embedder: Embedder for walks, nodes and later queries.
        client: LLM used for verbalization; ``None`` uses the template.
    """
    corpus = generate_corpus(walk_graph(g, config.undirected), config.walk_config())
    verbal = verbalize_corpus(corpus, client, concurrency=config.concurrency)
    index = build_index(corpus, verbal, embedder)
    logger.info(
        "artifacts_built", nodes=len(index.node_vectors), walk_vectors=len(index.walk_vectors)
    )
    return KnowledgeArtifacts(g, corpus, verbal, index, config)


def update_artifacts(
    artifacts: KnowledgeArtifacts,
    updates: Iterable[GraphUpdate],
    embedder: Embedder,
    client: Optional[LlmClient] = None,
) -> Tuple[KnowledgeArtifacts, UpdateCounts]:
    """
    Apply graph updates and refresh only what they can affect.

    The result equals ``build_artifacts`` on the updated graph whenever the
    verbalizer is deterministic. ``artifacts`` is left untouched.

    Raises:
        StaleCorpusError: The corpus does not belong to ``artifacts.graph``.
    """
    updates = list(updates)
    counts = UpdateCounts(updates=len(updates))
    config = artifacts.config
    graph_after, _ = apply_updates(artifacts.graph, updates)
    walks_after = walk_graph(graph_after, config.undirected)
    change = diff_graphs(artifacts.walk_graph, walks_after)

    roots = affected_roots(walks_after, artifacts.corpus, change)
    corpus = regenerate_roots(walks_after, artifacts.corpus, roots)
    counts.recomputed_roots = len(roots)
    counts.regenerated_walks = sum(len(corpus.walks.get(root, ())) for root in roots)

    verbal = artifacts.verbalizations.copy()
    counts.dropped_walks = verbal.retain(corpus.walk_keys())
    kept = len(verbal)
    verbalize_corpus(corpus, client, verbal, concurrency=config.concurrency)
    counts.new_verbalizations = len(verbal) - kept

    index = artifacts.index.copy()
    counts.recomputed_vectors = index_roots(index, corpus, verbal, embedder, roots)

    logger.info("artifacts_updated", **vars(counts))
    return KnowledgeArtifacts(graph_after, corpus, verbal, index, config), counts


def dump_graph(g: Graph) -> str:
    payload = {"nodes": sorted(g.nodes), "edges": [list(edge) for edge in sorted(g.edges)]}
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"


def load_graph_snapshot(text: str) -> Graph:
    try:
        payload = json.loads(text)
        return Graph((tuple(edge) for edge in payload["edges"]), payload["nodes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid graph snapshot: {exc}") from exc


def _write_atomically(target: Path, contents: Dict[str, bytes]) -> None:
    """Write every file to a temporary sibling first, then rename them all."""
    staged = []
    try:
        for name, data in contents.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=target)
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            staged.append((tmp, target / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def save_artifacts(artifacts: KnowledgeArtifacts, out: Union[str, Path]) -> None:
    target = Path(out)
    target.mkdir(parents=True, exist_ok=True)
    _write_atomically(
        target,
        {
            GRAPH_FILE: dump_graph(artifacts.graph).encode("utf-8"),
            CORPUS_FILE: dump_corpus(artifacts.corpus).encode("utf-8"),
            VERBALIZATIONS_FILE: artifacts.verbalizations.dump().encode("utf-8"),
            INDEX_FILE: dump_index(artifacts.index),
            RUN_CONFIG_FILE: dump_run_config(artifacts.config).encode("utf-8"),
        },
    )
    logger.info("artifacts_saved", out=str(target))


def load_artifacts(out: Union[str, Path], config: RunConfig) -> KnowledgeArtifacts:
    """
    Read an artifact directory written by ``save_artifacts``.

    Build settings come from the stored run config; everything else from
    ``config``.

    Raises:
        ArtifactError: A file is missing.
        StaleCorpusError: The corpus does not match the stored graph.
    """
    source = Path(out)
    missing = [name for name in ARTIFACT_FILES if not (source / name).is_file()]
    if missing:
        raise ArtifactError(f"{source} is missing {', '.join(missing)}; run build first")

    try:
        stored = load_provenance((source / RUN_CONFIG_FILE).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ParseError(f"invalid {RUN_CONFIG_FILE}: {exc}") from exc
    config = config.with_provenance(stored)
    graph = load_graph_snapshot((source / GRAPH_FILE).read_text(encoding="utf-8"))
    corpus = load_corpus((source / CORPUS_FILE).read_text(encoding="utf-8"))
    verbal = VerbalizationCache.load((source / VERBALIZATIONS_FILE).read_text(encoding="utf-8"))
    index = load_index((source / INDEX_FILE).read_bytes())

    expected = walk_graph(graph, config.undirected).fingerprint()
    if corpus.graph_fingerprint != expected:
        raise StaleCorpusError(
            f"corpus in {source} was built from a different graph; rebuild the artifacts"
        )
    return KnowledgeArtifacts(graph, corpus, verbal, index, config)


@contextmanager
def artifact_lock(out: Union[str, Path]) -> Iterator[Path]:
    """
    Exclusive lock on an artifact directory for the duration of a command.

    Raises:
        ArtifactError: Another run holds the lock.
    """
    target = Path(out)
    target.mkdir(parents=True, exist_ok=True)
    lock = target / LOCK_FILE
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ArtifactError(
            f"{target} is locked by another run (remove {lock} if that run is gone)"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield target
    finally:
        lock.unlink(missing_ok=True)
