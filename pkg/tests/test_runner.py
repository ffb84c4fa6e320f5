import pytest

from conftest import DATA_DIR, CountingClient
from src.evaluation.metaqa import load_metaqa
from src.evaluation.runner import (
    evaluate_artifacts,
    format_sweep,
    run_sweep,
    setting_dirname,
    sweep_frame,
    sweep_settings,
)
from src.exceptions import AnswerError, ConfigError, LlmClientError
from src.models.llm_client import EchoLlmClient
from src.pipeline.artifacts import ARTIFACT_FILES, load_artifacts
from src.pipeline.config import validate_config
from src.walks.corpus import Traversal


@pytest.fixture
def examples():
    return load_metaqa(DATA_DIR / "qa_1hop.txt")


def test_sweep_settings_grid_is_sorted_and_unique():
    grid = sweep_settings(Traversal.RW, [3, 1, 3], [10, 5])
    assert grid == [(1, 5), (1, 10), (3, 5), (3, 10)]


def test_bfs_sweep_ignores_walk_counts():
    assert sweep_settings(Traversal.BFS, [2, 1], [5, 10]) == [(1, None), (2, None)]


@pytest.mark.parametrize("depths, walk_counts", [([], [5]), ([1], [])])
def test_empty_sweep_is_rejected(depths, walk_counts):
    with pytest.raises(ConfigError):
        sweep_settings(Traversal.RW, depths, walk_counts)


def test_setting_dirnames():
    assert setting_dirname(2, None) == "depth-2"
    assert setting_dirname(2, 20) == "depth-2-walks-20"


def test_evaluate_artifacts_scores_every_question(movie_artifacts, embedder, examples):
    report, records, answers = evaluate_artifacts(
        movie_artifacts, examples, embedder, EchoLlmClient(), concurrency=2
    )
    assert report.total == len(records) == len(answers) == len(examples)
    assert [a.question for a in answers] == [e.question for e in examples]


def test_evaluate_artifacts_raises_first_failure(movie_artifacts, embedder, examples):
    client = CountingClient(fail=LlmClientError("quota", retryable=False))
    with pytest.raises(AnswerError):
        evaluate_artifacts(movie_artifacts, examples[:3], embedder, client)
    assert client.calls == 3


def test_more_walks_never_lower_distinct_walks_per_node(movie_graph, embedder, examples):
    config = validate_config(depth=2, undirected=True)
    points = run_sweep(
        movie_graph, examples, config, [1, 2], [5, 10, 20], embedder, EchoLlmClient()
    )
    assert [(p.depth, p.num_walks) for p in points] == [
        (1, 5),
        (1, 10),
        (1, 20),
        (2, 5),
        (2, 10),
        (2, 20),
    ]
    for depth in (1, 2):
        per_node = [p.statistics.mean_distinct_per_root for p in points if p.depth == depth]
        assert per_node == sorted(per_node)
    assert all(p.report.total == len(examples) for p in points)
    assert all(p.traversal is Traversal.RW for p in points)


def test_bfs_sweep_on_toy_graph(movie_graph, embedder, examples, tmp_path):
    config = validate_config(traversal="bfs", undirected=True)
    points = run_sweep(
        movie_graph, examples, config, [2, 1], [5], embedder, EchoLlmClient(), out=tmp_path
    )
    assert [(p.depth, p.num_walks) for p in points] == [(1, None), (2, None)]
    shallow, deep = (p.statistics.mean_distinct_per_root for p in points)
    assert deep >= shallow
    assert points[1].report.per_hop[1].hits_at_1 >= 0.9
    for name in ("depth-1", "depth-2"):
        assert all((tmp_path / name / artifact).is_file() for artifact in ARTIFACT_FILES)
    stored = load_artifacts(tmp_path / "depth-1", validate_config())
    assert (stored.config.traversal, stored.config.depth) == (Traversal.BFS, 1)


def test_invalid_setting_fails_before_any_build(movie_graph, embedder, examples, tmp_path):
    client = CountingClient()
    with pytest.raises(ConfigError):
        run_sweep(
            movie_graph, examples, validate_config(), [1, 0], [5], embedder, client, out=tmp_path
        )
    assert client.calls == 0
    assert not list(tmp_path.iterdir())


def test_sweep_frame_has_one_row_per_setting(movie_graph, embedder, examples):
    config = validate_config(depth=1)
    points = run_sweep(
        movie_graph, examples[:4], config, [1, 2], [3, 6], embedder, EchoLlmClient()
    )
    frame = sweep_frame(points)
    assert frame.index.names == ["depth", "num_walks"]
    assert list(frame.index) == [(1, 3), (1, 6), (2, 3), (2, 6)]
    assert list(frame.columns[:2]) == ["walks/node", "dup%"]
    record = points[0].to_record()
    assert record["record"] == "sweep"
    walks_per_node = frame.iloc[0]["walks/node"]
    assert record["distinct_walks_per_node"] == pytest.approx(walks_per_node, abs=1e-6)
    assert record["hits_at_1"] * 100 == pytest.approx(frame.iloc[0]["hits@1%"])
    text = format_sweep(points)
    assert "walks/node" in text and "hits@1%" in text
