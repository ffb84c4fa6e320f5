"""
Shared fixtures: the toy movie graph, random graph factories and mock LLM clients.
"""
import random
import threading
from pathlib import Path
from typing import List, Optional

import pytest

from config.log_setup import configure_logging
from src.exceptions import LlmClientError
from src.index.embedders import HashedBowEmbedder
from src.kg.graph import Graph, GraphUpdate, apply_update
from src.kg.parsers import load_graph
from src.models.llm_client import EchoLlmClient
from src.pipeline.artifacts import KnowledgeArtifacts, build_artifacts
from src.pipeline.config import validate_config

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"
RELATIONS = ("r", "s", "knows")


@pytest.fixture(autouse=True)
def _quiet_logs():
    # Rebind per test: the CLI reconfigures logging onto captured streams.
    configure_logging("WARNING")


@pytest.fixture
def movie_graph() -> Graph:
    return load_graph(DATA_DIR / "movies.txt")


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def embedder() -> HashedBowEmbedder:
    return HashedBowEmbedder(256)


@pytest.fixture
def movie_artifacts(movie_graph, embedder) -> KnowledgeArtifacts:
    """Template-verbalized artifacts for the toy movie graph, built in both directions."""
    config = validate_config(graph=DATA_DIR / "movies.txt", depth=2, num_walks=20, undirected=True)
    return build_artifacts(movie_graph, config, embedder)


def random_graph(rng: random.Random, max_nodes: int = 20, max_edges: int = 60) -> Graph:
    """Random multigraph with up to ``max_nodes`` nodes (some possibly isolated)."""
    n = rng.randint(1, max_nodes)
    labels = [f"n{i}" for i in range(n)]
    graph = Graph(nodes=labels)
    for _ in range(rng.randint(0, max_edges)):
        graph.add_edge(rng.choice(labels), rng.choice(RELATIONS), rng.choice(labels))
    return graph


def random_updates(rng: random.Random, g: Graph, count: int) -> List[GraphUpdate]:
    """A valid update sequence for ``g``; removals only target existing elements."""
    current = g.copy()
    updates = []
    fresh = 0
    for _ in range(count):
        choice = rng.random()
        nodes = sorted(current.nodes)
        edges = sorted(current.edges)
        if choice < 0.4 or not nodes:
            pool = nodes + [f"new{fresh}"]
            fresh += 1
            update = GraphUpdate.add_edge(rng.choice(pool), rng.choice(RELATIONS), rng.choice(pool))
        elif choice < 0.65 and edges:
            update = GraphUpdate.remove_edge(*rng.choice(edges))
        elif choice < 0.8:
            update = GraphUpdate.add_node(f"new{fresh}")
            fresh += 1
        else:
            update = GraphUpdate.remove_node(rng.choice(nodes))
        updates.append(update)
        current, _ = apply_update(current, update)
    return updates


class CountingClient:
    """Echo client that counts calls; optionally fails every call."""

    def __init__(self, fail: Optional[LlmClientError] = None, response: Optional[str] = None):
        self.model = "mock-counting"
        self.timeout = None
        self.calls = 0
        self.prompts = []
        self._fail = fail
        self._response = response
        self._echo = EchoLlmClient()
        self._lock = threading.Lock()

    def send(self, system_text: str, human_text: str, temperature: float = 0.0) -> str:
        with self._lock:
            self.calls += 1
            self.prompts.append((system_text, human_text, temperature))
        if self._fail is not None:
            raise self._fail
        if self._response is not None:
            return self._response
        return self._echo.send(system_text, human_text, temperature)


@pytest.fixture
def counting_client() -> CountingClient:
    return CountingClient()
