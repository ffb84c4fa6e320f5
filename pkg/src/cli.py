"""
Command-line interface: build, update, query, eval and sweep.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog

from config.log_setup import configure_logging
from config.settings import settings
from src.exceptions import (
    AnswerError,
    ConfigError,
    EmbeddingServiceError,
    KGRagError,
    LlmClientError,
    VerbalizationError,
)
from src.evaluation.metaqa import QaExample, load_metaqa
from src.evaluation.report import format_table, report_lines
from src.evaluation.runner import evaluate_artifacts, format_sweep, run_sweep
from src.graph.workflow import AnswerWorkflow
from src.index.embedders import Embedder, build_embedder
from src.kg.parsers import load_graph, load_updates
from src.models.llm_client import LlmClient, build_llm_client
from src.pipeline.artifacts import (
    KnowledgeArtifacts,
    artifact_lock,
    build_artifacts,
    load_artifacts,
    save_artifacts,
    update_artifacts,
)
from src.pipeline.config import RunConfig, validate_config
from src.state.qa_state import Answer
from src.walks.corpus import Traversal, corpus_statistics

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EXTERNAL = 3

_EXTERNAL_ERRORS = (LlmClientError, AnswerError, VerbalizationError, EmbeddingServiceError)

# argparse destination -> RunConfig field
_CONFIG_OPTIONS = (
    "graph",
    "out",
    "traversal",
    "depth",
    "num_walks",
    "seed",
    "undirected",
    "embedder",
    "embedding_dimension",
    "embedding_endpoint",
    "embedding_model",
    "k",
    "verbalizer",
    "llm_endpoint",
    "llm_model",
    "llm_timeout",
    "mock_llm",
    "concurrency",
    "limit",
    "hops",
)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common_options() -> argparse.ArgumentParser:
    parent = _ArgumentParser(add_help=False)
    parent.add_argument("--out", type=Path, default=Path("artifacts"), help="artifact directory")
    parent.add_argument("--graph", type=Path, help="graph file (.nt or pipe/TAB triples)")
    parent.add_argument("--traversal", choices=[t.value for t in Traversal])
    parent.add_argument("--depth", type=int, help="walk length (rw) or BFS depth (bfs)")
    parent.add_argument("--num-walks", dest="num_walks", type=int, help="random walks per node")
    parent.add_argument("--seed", type=int, help="global seed")
    parent.add_argument(
        "--undirected", action="store_true", help="add inverse edges before walking"
    )
    parent.add_argument("--k", type=int, help="nodes retrieved, and walks per node")
    parent.add_argument("--embedder", choices=["hashed-bow", "remote"])
    parent.add_argument("--embedding-dimension", dest="embedding_dimension", type=int)
    parent.add_argument("--embedding-endpoint", dest="embedding_endpoint")
    parent.add_argument("--embedding-model", dest="embedding_model")
    parent.add_argument("--verbalizer", choices=["template", "llm"])
    parent.add_argument("--llm-endpoint", dest="llm_endpoint")
    parent.add_argument("--llm-model", dest="llm_model")
    parent.add_argument("--llm-timeout", dest="llm_timeout", type=float)
    parent.add_argument("--mock-llm", dest="mock_llm", choices=["echo", "refuse"])
    parent.add_argument("--concurrency", type=int)
    parent.add_argument("--log-level", dest="log_level", default=settings.LOG_LEVEL)
    parent.add_argument("--json-logs", dest="json_logs", action="store_true")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="kg-walk-qa",
        description="Question answering over a knowledge graph via verbalized walks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    commands.add_parser("build", parents=[common], help="generate walks, verbalize and index")

    update = commands.add_parser(
        "update", parents=[common], help="apply graph updates incrementally"
    )
    update.add_argument("--updates", type=Path, required=True, help="update file")

    query = commands.add_parser("query", parents=[common], help="answer one question")
    query.add_argument("--question", required=True)
    query.add_argument("--answer-log", dest="answer_log", type=Path)

    evaluate = commands.add_parser("eval", parents=[common], help="evaluate on a question file")
    evaluate.add_argument(
        "--questions", type=Path, required=True, help="MetaQA-style question file"
    )
    evaluate.add_argument("--limit", type=int, help="evaluate a seeded sample of N questions")
    evaluate.add_argument("--hops", type=int, help="hop tag for every question")
    evaluate.add_argument(
        "--records", type=Path, help="JSON-lines output (default: OUT/eval_records.jsonl)"
    )
    evaluate.add_argument("--answer-log", dest="answer_log", type=Path)

    sweep = commands.add_parser(
        "sweep", parents=[common], help="rebuild and evaluate over depths and walk counts"
    )
    sweep.add_argument("--questions", type=Path, required=True, help="MetaQA-style question file")
    sweep.add_argument("--depths", type=int, nargs="+", required=True, help="walk depths to try")
    sweep.add_argument(
        "--walk-counts",
        dest="walk_counts",
        type=int,
        nargs="+",
        help="random walks per node to try (default: --num-walks)",
    )
    sweep.add_argument("--limit", type=int, help="evaluate a seeded sample of N questions")
    sweep.add_argument("--hops", type=int, help="hop tag for every question")
    sweep.add_argument(
        "--records", type=Path, help="JSON-lines output (default: OUT/sweep_records.jsonl)"
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, Any] = {
        name: getattr(args, name)
        for name in _CONFIG_OPTIONS
        if getattr(args, name, None) is not None
    }
    return validate_config(**values)


def make_embedder(config: RunConfig) -> Embedder:
    return build_embedder(
        config.embedder,
        dimension=config.embedding_dimension,
        endpoint=config.embedding_endpoint,
        model=config.embedding_model,
        api_key=settings.EMBEDDING_API_KEY or None,
    )


def make_client(config: RunConfig) -> LlmClient:
    return build_llm_client(
        mock=config.mock_llm,
        model=config.llm_model,
        endpoint=config.llm_endpoint,
        timeout=config.llm_timeout,
    )


def _verbalization_client(config: RunConfig) -> Optional[LlmClient]:
    return make_client(config) if config.verbalizer == "llm" else None


def _query_embedder(artifacts: KnowledgeArtifacts) -> Embedder:
    embedder = make_embedder(artifacts.config)
    if embedder.identifier != artifacts.index.embedder_id:
        raise ConfigError(
            f"index was built with {artifacts.index.embedder_id!r}, "
            f"not {embedder.identifier!r}"
        )
    return embedder


def _append_lines(path: Optional[Path], lines: Sequence[str]) -> None:
    if path is None:
        return
    with path.open("a", encoding="utf-8") as handle:
        for line in lines:
            handle.write(line + "\n")


def cmd_build(config: RunConfig) -> KnowledgeArtifacts:
    """Build and save artifacts for ``config.graph``."""
    if config.graph is None:
        raise ConfigError("build needs --graph")
    with artifact_lock(config.out):
        graph = load_graph(config.graph)
        artifacts = build_artifacts(
            graph, config, make_embedder(config), _verbalization_client(config)
        )
        save_artifacts(artifacts, config.out)

    stats = corpus_statistics(artifacts.corpus)
    print(f"nodes: {graph.num_nodes}")
    print(f"edges: {graph.num_edges}")
    print(
        f"traversal: {config.traversal.value} depth={config.depth} "
        f"num_walks={config.num_walks} seed={config.seed}"
    )
    print(f"distinct walks: {stats.distinct_walks}")
    print(f"generated walks: {stats.generated_walks}")
    print(f"duplicate ratio: {stats.duplicate_ratio:.4f}")
    print(f"verbalizations: {len(artifacts.verbalizations)}")
    print(f"vectors: {len(artifacts.index)}")
    return artifacts


def cmd_update(config: RunConfig, updates_path: Path) -> KnowledgeArtifacts:
    """Apply an update file to the artifacts in ``config.out``."""
    updates = load_updates(updates_path)
    with artifact_lock(config.out):
        artifacts = load_artifacts(config.out, config)
        updated, counts = update_artifacts(
            artifacts,
            updates,
            make_embedder(artifacts.config),
            _verbalization_client(artifacts.config),
        )
        save_artifacts(updated, config.out)

    for name, value in vars(counts).items():
        print(f"{name.replace('_', ' ')}: {value}")
    return updated


def _print_answer(answer: Answer) -> None:
    retrieval = answer.retrieval
    print(f"retrieved nodes (k={retrieval.k}):")
    for rank, (node, similarity) in enumerate(retrieval.nodes, start=1):
        print(f"  {rank}. {node}  {similarity:.4f}")
    print("context walks:")
    for rank, walk in enumerate(retrieval.walks, start=1):
        print(f"  {rank}. [{walk.similarity:.4f}] ({walk.owner}) {walk.text}")
    print(f"answer: {answer.response_text}")
    print(f"abstained: {str(answer.abstained).lower()}")
    print(f"elapsed_s: {answer.elapsed_s:.4f}")


def cmd_query(config: RunConfig, question: str, answer_log: Optional[Path] = None) -> Answer:
    """Answer one question and print the retrieval trace."""
    with artifact_lock(config.out):
        artifacts = load_artifacts(config.out, config)
    workflow = AnswerWorkflow(
        artifacts.index,
        artifacts.verbalizations,
        _query_embedder(artifacts),
        make_client(artifacts.config),
        k=artifacts.config.k,
    )
    answer = workflow.answer(question)
    _print_answer(answer)
    _append_lines(answer_log, [_record_line(answer.to_record())])
    return answer


def _record_line(record: Dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def sample_examples(examples: List[QaExample], limit: Optional[int], seed: int) -> List[QaExample]:
    """Seeded sample of ``limit`` examples, kept in file order."""
    if limit is None or limit >= len(examples):
        return examples
    picked = np.random.default_rng(seed).choice(len(examples), size=limit, replace=False)
    return [examples[i] for i in sorted(int(i) for i in picked)]


def cmd_eval(
    config: RunConfig,
    questions_path: Path,
    records_path: Optional[Path] = None,
    answer_log: Optional[Path] = None,
):
    """Answer a question file and print the aggregate report."""
    examples = sample_examples(load_metaqa(questions_path, config.hops), config.limit, config.seed)
    if not examples:
        raise ConfigError(f"{questions_path} contains no questions")

    with artifact_lock(config.out):
        artifacts = load_artifacts(config.out, config)
    report, records, answers = evaluate_artifacts(
        artifacts,
        examples,
        _query_embedder(artifacts),
        make_client(artifacts.config),
        config.concurrency,
    )
    print(format_table(report))

    records_path = records_path or Path(config.out) / "eval_records.jsonl"
    lines = report_lines(report, records)
    records_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    _append_lines(answer_log, [_record_line(answer.to_record()) for answer in answers])
    logger.info("evaluation_finished", questions=report.total, records=str(records_path))
    return report


def cmd_sweep(
    config: RunConfig,
    questions_path: Path,
    depths: Sequence[int],
    walk_counts: Optional[Sequence[int]] = None,
    records_path: Optional[Path] = None,
):
    """Build and evaluate one artifact set per (depth, num_walks) setting."""
    if config.graph is None:
        raise ConfigError("sweep needs --graph")
    examples = sample_examples(load_metaqa(questions_path, config.hops), config.limit, config.seed)
    if not examples:
        raise ConfigError(f"{questions_path} contains no questions")

    graph = load_graph(config.graph)
    with artifact_lock(config.out):
        points = run_sweep(
            graph,
            examples,
            config,
            depths,
            walk_counts or [config.num_walks],
            make_embedder(config),
            make_client(config),
            _verbalization_client(config),
            out=config.out,
        )
    print(format_sweep(points))

    records_path = records_path or Path(config.out) / "sweep_records.jsonl"
    lines = [_record_line(point.to_record()) for point in points]
    records_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    logger.info("sweep_finished", settings=len(points), records=str(records_path))
    return points


def run(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    if args.command == "build":
        cmd_build(config)
    elif args.command == "update":
        cmd_update(config, args.updates)
    elif args.command == "query":
        cmd_query(config, args.question, args.answer_log)
    elif args.command == "eval":
        cmd_eval(config, args.questions, args.records, args.answer_log)
    elif args.command == "sweep":
        cmd_sweep(config, args.questions, args.depths, args.walk_counts, args.records)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level, args.json_logs)
    try:
        return run(args)
    except _EXTERNAL_ERRORS as exc:
        logger.error("command_failed", command=args.command, error=str(exc), kind="external")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except ConfigError as exc:
        logger.error("command_failed", command=args.command, error=str(exc), kind="usage")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KGRagError, OSError) as exc:
        logger.error("command_failed", command=args.command, error=str(exc), kind="data")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
