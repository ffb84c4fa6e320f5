"""
Walk, configuration and corpus types plus the corpus file format.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from statistics import fmean
from typing import Any, Dict, Iterator, List, Optional, Tuple

from src.exceptions import ConfigError, ParseError
from src.kg.graph import Edge, NodeId, Step

MAX_SEED = (1 << 64) - 1


class Traversal(str, Enum):
    RW = "rw"
    BFS = "bfs"


def walk_key(root: NodeId, steps: Tuple[Step, ...]) -> str:
    """Canonical identity of a walk: its label sequence as compact JSON."""
    labels: List[str] = [root]
    for relation, node in steps:
        labels.extend((relation, node))
    return json.dumps(labels, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class Walk:
    """Alternating node/relation sequence rooted at ``root``."""

    root: NodeId
    steps: Tuple[Step, ...] = ()
    kind: Traversal = Traversal.RW
    seed: Optional[int] = None

    @property
    def key(self) -> str:
        return walk_key(self.root, self.steps)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def nodes(self) -> List[NodeId]:
        return [self.root] + [node for _, node in self.steps]

    def triples(self) -> List[Edge]:
        """The walk's edges in walk order."""
        result = []
        head = self.root
        for relation, tail in self.steps:
            result.append((head, relation, tail))
            head = tail
        return result


@dataclass(frozen=True)
class WalkConfig:
    """
    Corpus generation parameters.

    ``depth`` is the walk length l for random walks and the maximum
    shortest-path distance d for BFS walks.
    """

    depth: int
    num_walks: int = 60
    traversal: Traversal = Traversal.RW
    global_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "traversal", Traversal(self.traversal))
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.traversal is Traversal.RW and self.num_walks < 1:
            raise ConfigError("num_walks must be >= 1 for random walks")
        if not 0 <= self.global_seed <= MAX_SEED:
            raise ConfigError("global_seed must be an unsigned 64-bit value")


@dataclass
class Corpus:
    """Distinct walks per root, with duplicate counts for random walks."""

    walks: Dict[NodeId, List[Walk]]
    multiplicity: Dict[str, int]
    config: WalkConfig
    graph_fingerprint: str

    def iter_walks(self) -> Iterator[Walk]:
        for root in sorted(self.walks):
            yield from self.walks[root]

    def walk_keys(self) -> set:
        return {walk.key for walk in self.iter_walks()}

    def verbalizable_walks(self) -> List[Walk]:
        """Distinct walks with at least one step."""
        return [walk for walk in self.iter_walks() if walk.steps]

    def __len__(self) -> int:
        return sum(len(walks) for walks in self.walks.values())


@dataclass
class CorpusStatistics:
    roots: int
    generated_walks: int
    distinct_walks: int
    verbalizable_walks: int
    mean_distinct_per_root: float
    duplicate_ratio: float
    extra: Dict[str, Any] = field(default_factory=dict)


def corpus_statistics(corpus: Corpus) -> CorpusStatistics:
    """Walk counts and the share of generated walks that were duplicates."""
    distinct = len(corpus)
    generated = sum(corpus.multiplicity.get(w.key, 1) for w in corpus.iter_walks())
    per_root = [len(walks) for walks in corpus.walks.values()]
    return CorpusStatistics(
        roots=len(corpus.walks),
        generated_walks=generated,
        distinct_walks=distinct,
        verbalizable_walks=len(corpus.verbalizable_walks()),
        mean_distinct_per_root=fmean(per_root) if per_root else 0.0,
        duplicate_ratio=1.0 - distinct / generated if generated else 0.0,
    )


def _dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def dump_corpus(corpus: Corpus) -> str:
    """
    Serialize as JSON lines: one header record, then one record per distinct
    walk, ordered by root and, within a root, by generation order.
    """
    cfg = corpus.config
    header = {
        "record": "header",
        "traversal": cfg.traversal.value,
        "depth": cfg.depth,
        "num_walks": cfg.num_walks,
        "global_seed": cfg.global_seed,
        "graph_fingerprint": corpus.graph_fingerprint,
        "empty_roots": sorted(root for root, walks in corpus.walks.items() if not walks),
    }
    lines = [_dumps(header)]
    for walk in corpus.iter_walks():
        record = {
            "record": "walk",
            "root": walk.root,
            "kind": walk.kind.value,
            "depth": walk.length,
            "multiplicity": corpus.multiplicity[walk.key],
            "steps": [label for step in walk.steps for label in step],
        }
        if walk.seed is not None:
            record["seed"] = walk.seed
        lines.append(_dumps(record))
    return "\n".join(lines) + "\n"


def load_corpus(text: str) -> Corpus:
    """Inverse of ``dump_corpus``."""
    header = None
    walks: Dict[NodeId, List[Walk]] = {}
    multiplicity: Dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if record["record"] == "header":
                header = record
                for root in record["empty_roots"]:
                    walks.setdefault(root, [])
                continue
            labels = record["steps"]
            if len(labels) % 2:
                raise ParseError("odd number of step labels", number)
            steps = tuple(zip(labels[0::2], labels[1::2]))
            walk = Walk(record["root"], steps, Traversal(record["kind"]), record.get("seed"))
            walks.setdefault(walk.root, []).append(walk)
            multiplicity[walk.key] = int(record["multiplicity"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"invalid corpus record: {exc}", number) from exc
    if header is None:
        raise ParseError("corpus file has no header record")
    config = WalkConfig(
        depth=header["depth"],
        num_walks=header["num_walks"],
        traversal=Traversal(header["traversal"]),
        global_seed=header["global_seed"],
    )
    return Corpus(walks, multiplicity, config, header["graph_fingerprint"])
