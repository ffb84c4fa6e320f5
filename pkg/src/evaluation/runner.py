"""
Evaluation runs: answer a question set on built artifacts, and sweep the walk
depth and walk count by rebuilding the artifacts for every setting.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
import structlog

from src.evaluation.metaqa import QaExample
from src.evaluation.report import EvalRecord, EvalReport, aggregate, evaluate_answer
from src.exceptions import ConfigError
from src.graph.workflow import AnswerWorkflow
from src.index.embedders import Embedder
from src.kg.graph import Graph
from src.models.llm_client import LlmClient
from src.pipeline.artifacts import KnowledgeArtifacts, build_artifacts, save_artifacts
from src.pipeline.config import RunConfig, validate_config
from src.state.qa_state import Answer
from src.walks.corpus import CorpusStatistics, Traversal, corpus_statistics

logger = structlog.get_logger(__name__)


def evaluate_artifacts(
    artifacts: KnowledgeArtifacts,
    examples: Sequence[QaExample],
    embedder: Embedder,
    client: LlmClient,
    concurrency: Optional[int] = None,
) -> Tuple[EvalReport, List[EvalRecord], List[Answer]]:
    """
    Answer every example once and score the responses.

    Raises:
        AnswerError: The first failed answer, after all questions ran.
    """
    workflow = AnswerWorkflow(
        artifacts.index, artifacts.verbalizations, embedder, client, k=artifacts.config.k
    )
    answers = workflow.answer_batch([example.question for example in examples], concurrency)
    failures = [a for a in answers if isinstance(a, BaseException)]
    if failures:
        raise failures[0]
    records = [evaluate_answer(example, answer) for example, answer in zip(examples, answers)]
    return aggregate(records), records, answers


@dataclass(frozen=True)
class SweepPoint:
    traversal: Traversal
    depth: int
    num_walks: Optional[int]
    statistics: CorpusStatistics
    report: EvalReport

    def to_record(self) -> Dict[str, Any]:
        return {
            "record": "sweep",
            "traversal": self.traversal.value,
            "depth": self.depth,
            "num_walks": self.num_walks,
            "distinct_walks": self.statistics.distinct_walks,
            "distinct_walks_per_node": round(self.statistics.mean_distinct_per_root, 6),
            "duplicate_ratio": round(self.statistics.duplicate_ratio, 6),
            "total": self.report.total,
            **self.report.rates(),
        }


def sweep_settings(
    traversal: Traversal, depths: Sequence[int], walk_counts: Sequence[int]
) -> List[Tuple[int, Optional[int]]]:
    """
    (depth, num_walks) grid in ascending order.

    BFS corpora do not depend on the walk count, so a BFS sweep varies depth
    only and its settings carry ``None``.
    """
    if not depths or not walk_counts:
        raise ConfigError("a sweep needs at least one depth and one walk count")
    counts: List[Optional[int]] = (
        [None] if traversal is Traversal.BFS else sorted(set(walk_counts))
    )
    return [(depth, count) for depth in sorted(set(depths)) for count in counts]


def setting_dirname(depth: int, num_walks: Optional[int]) -> str:
    return f"depth-{depth}" if num_walks is None else f"depth-{depth}-walks-{num_walks}"


def run_sweep(
    graph: Graph,
    examples: Sequence[QaExample],
    config: RunConfig,
    depths: Sequence[int],
    walk_counts: Sequence[int],
    embedder: Embedder,
    client: LlmClient,
    verbalization_client: Optional[LlmClient] = None,
    out: Optional[Path] = None,
) -> List[SweepPoint]:
    """
    Build and evaluate the artifacts for every setting of the grid.

    Args:
        graph: Knowledge graph as loaded.
        examples: Questions answered at every setting.
        config: Base run configuration; depth and num_walks are overridden.
        depths: Walk depths to try.
        walk_counts: Random walks per node to try (ignored for BFS).
        embedder: Embedder shared by every setting.
        client: Answering client.
        verbalization_client: LLM verbalizer client, or None for templates.
        out: When set, each setting is saved to ``out/<setting>``.

    Raises:
        ConfigError: A depth or walk count is out of range; checked before
            any setting is built.
    """
    grid = sweep_settings(config.traversal, depths, walk_counts)
    base = config.model_dump()
    configs = [
        validate_config(
            **{
                **base,
                "depth": depth,
                "num_walks": config.num_walks if count is None else count,
            }
        )
        for depth, count in grid
    ]

    points = []
    for (depth, count), point_config in zip(grid, configs):
        artifacts = build_artifacts(graph, point_config, embedder, verbalization_client)
        if out is not None:
            save_artifacts(artifacts, Path(out) / setting_dirname(depth, count))
        report, _, _ = evaluate_artifacts(
            artifacts, examples, embedder, client, point_config.concurrency
        )
        stats = corpus_statistics(artifacts.corpus)
        logger.info(
            "sweep_setting_evaluated",
            depth=depth,
            num_walks=count,
            distinct_per_node=round(stats.mean_distinct_per_root, 4),
            hits_at_1=float(report.hits_at_1),
        )
        points.append(SweepPoint(config.traversal, depth, count, stats, report))
    return points


def sweep_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    """One row per setting; rates in percent."""
    rows = []
    for point in points:
        row: Dict[str, Any] = {"depth": point.depth}
        if point.num_walks is not None:
            row["num_walks"] = point.num_walks
        row.update(
            {
                "walks/node": point.statistics.mean_distinct_per_root,
                "dup%": point.statistics.duplicate_ratio * 100,
                "acc%": float(point.report.accuracy) * 100,
                "hall%": float(point.report.hallucination) * 100,
                "miss%": float(point.report.missing_rate) * 100,
                "truth%": float(point.report.truthfulness) * 100,
                "hits@1%": float(point.report.hits_at_1) * 100,
            }
        )
        rows.append(row)
    frame = pd.DataFrame(rows)
    return frame.set_index([c for c in ("depth", "num_walks") if c in frame.columns])


def format_sweep(points: Sequence[SweepPoint]) -> str:
    return sweep_frame(points).to_string(float_format="{:.2f}".format)
