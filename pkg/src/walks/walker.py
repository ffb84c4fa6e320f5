"""
Random-walk and BFS spanning-tree walk generation.
"""
from collections import deque
from typing import Dict, List, Set, Tuple

import numpy as np
import structlog

from src.exceptions import ConfigError, NodeNotFoundError
from src.kg.graph import Graph, NodeId, Step
from src.walks.corpus import Corpus, Traversal, Walk, WalkConfig, corpus_statistics
from src.walks.seeds import walk_seed

logger = structlog.get_logger(__name__)


def _require_node(g: Graph, root: NodeId) -> None:
    if root not in g.nodes:
        raise NodeNotFoundError(root)


def random_walk(g: Graph, root: NodeId, depth: int, seed: int) -> Walk:
    """
    One random walk of at most ``depth`` steps.

    Each step draws uniformly from the ordered (relation, target) list of the
    current node; the walk stops early at a sink.
    """
    _require_node(g, root)
    rng = np.random.default_rng(seed)
    steps: List[Step] = []
    current = root
    for _ in range(depth):
        choices = g.forward_adj[current]
        if not choices:
            break
        relation, current = choices[int(rng.integers(len(choices)))]
        steps.append((relation, current))
    return Walk(root, tuple(steps), Traversal.RW, seed)


def bfs_layers(g: Graph, root: NodeId, max_depth: int) -> List[Set[NodeId]]:
    """
    Layers L_0..L_d of nodes first reached at each distance from ``root``.

    Trailing empty layers are not returned.
    """
    _require_node(g, root)
    layers = [{root}]
    seen = {root}
    while len(layers) <= max_depth:
        frontier = {t for v in layers[-1] for _, t in g.forward_adj[v] if t not in seen}
        if not frontier:
            break
        seen |= frontier
        layers.append(frontier)
    return layers


def bfs_tree_walks(g: Graph, root: NodeId, depth: int) -> List[Walk]:
    """Root-to-node paths of the BFS spanning tree, one per reached node."""
    _require_node(g, root)
    paths: Dict[NodeId, Tuple[Step, ...]] = {root: ()}
    queue = deque([root])
    walks = []
    while queue:
        node = queue.popleft()
        prefix = paths[node]
        if len(prefix) == depth:
            continue
        for relation, target in g.forward_adj[node]:
            if target in paths:
                continue
            paths[target] = prefix + ((relation, target),)
            queue.append(target)
            walks.append(Walk(root, paths[target], Traversal.BFS))
    return walks


def root_walks(g: Graph, root: NodeId, cfg: WalkConfig) -> Tuple[List[Walk], Dict[str, int]]:
    """Distinct walks for one root and their multiplicities."""
    if cfg.traversal is Traversal.BFS:
        walks = bfs_tree_walks(g, root, cfg.depth)
        return walks, {walk.key: 1 for walk in walks}

    distinct: List[Walk] = []
    counts: Dict[str, int] = {}
    for index in range(cfg.num_walks):
        walk = random_walk(g, root, cfg.depth, walk_seed(cfg.global_seed, root, index))
        if walk.key in counts:
            counts[walk.key] += 1
        else:
            counts[walk.key] = 1
            distinct.append(walk)
    return distinct, counts


def _generate(g: Graph, cfg: WalkConfig) -> Corpus:
    walks: Dict[NodeId, List[Walk]] = {}
    multiplicity: Dict[str, int] = {}
    for root in sorted(g.nodes):
        walks[root], counts = root_walks(g, root, cfg)
        multiplicity.update(counts)
    corpus = Corpus(walks, multiplicity, cfg, g.fingerprint())
    stats = corpus_statistics(corpus)
    logger.info(
        "corpus_generated",
        traversal=cfg.traversal.value,
        depth=cfg.depth,
        roots=stats.roots,
        distinct_walks=stats.distinct_walks,
        duplicate_ratio=round(stats.duplicate_ratio, 4),
    )
    return corpus


def generate_rw_corpus(g: Graph, cfg: WalkConfig) -> Corpus:
    """n_w seeded random walks per node, duplicates collapsed into counts."""
    if cfg.traversal is not Traversal.RW:
        raise ConfigError("generate_rw_corpus requires traversal=rw")
    return _generate(g, cfg)


def generate_bfs_corpus(g: Graph, cfg: WalkConfig) -> Corpus:
    """BFS spanning-tree walks within depth d for every node."""
    if cfg.traversal is not Traversal.BFS:
        raise ConfigError("generate_bfs_corpus requires traversal=bfs")
    return _generate(g, cfg)


def generate_corpus(g: Graph, cfg: WalkConfig) -> Corpus:
    if cfg.traversal is Traversal.BFS:
        return generate_bfs_corpus(g, cfg)
    return generate_rw_corpus(g, cfg)
