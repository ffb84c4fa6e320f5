import json
from fractions import Fraction

import pytest

from src.evaluation.metaqa import QaExample, hop_count_from_path, load_metaqa, parse_metaqa
from src.evaluation.metrics import (
    ACCURATE,
    HALLUCINATED,
    MISSING,
    ExactMatchJudge,
    hits_at_1,
    score_exact,
    score_response,
)
from src.evaluation.report import (
    EvalRecord,
    aggregate,
    evaluate_answer,
    format_table,
    report_frame,
    report_lines,
)
from src.exceptions import ParseError
from src.prompts.templates import ABSTENTION_SENTENCE
from src.state.qa_state import Answer


def test_parse_metaqa_line():
    text = "what movies did [Sergio Leone] write\tA Fistful of Dollars|For a Few Dollars More\n"
    (example,) = parse_metaqa(text)
    assert example.question == "what movies did Sergio Leone write"
    assert example.gold_entities == {"A Fistful of Dollars", "For a Few Dollars More"}
    assert example.hop_count is None


def test_parse_metaqa_skips_blank_lines_and_keeps_order():
    examples = parse_metaqa("q1 [a]\tx\n\n  \nq2 [b]\ty\n", hop_count=2)
    assert [e.question for e in examples] == ["q1 a", "q2 b"]
    assert all(e.hop_count == 2 for e in examples)


@pytest.mark.parametrize("text, line", [("no tab here\n", 1), ("q\tx\nq2\t | \n", 2)])
def test_parse_metaqa_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_metaqa(text)
    assert info.value.line == line


def test_example_needs_gold():
    with pytest.raises(ValueError):
        QaExample("q", frozenset())


@pytest.mark.parametrize(
    "path, hops",
    [
        ("MetaQA/1-hop/vanilla/qa_test.txt", 1),
        ("data/qa_2hop.txt", 2),
        ("3_hop/test.txt", 3),
        ("questions.txt", None),
    ],
)
def test_hop_count_from_path(path, hops):
    assert hop_count_from_path(path) == hops


def test_load_metaqa_fixtures(data_dir):
    one = load_metaqa(data_dir / "qa_1hop.txt")
    two = load_metaqa(data_dir / "qa_2hop.txt")
    assert len(one) == 10 and {e.hop_count for e in one} == {1}
    assert len(two) == 5 and {e.hop_count for e in two} == {2}
    assert one[0].question == "who directed Inception"
    assert two[3].gold_entities == {"Leonardo DiCaprio", "Matthew McConaughey"}
    assert load_metaqa(data_dir / "qa_1hop.txt", hop_count=7)[0].hop_count == 7


def test_hits_at_1_token_boundaries():
    assert hits_at_1("It was Alexander.", ["Alexander"]) == 1
    assert hits_at_1("It was Alexander.", ["Alex"]) == 0
    assert hits_at_1("directed by christopher nolan", ["Christopher Nolan"]) == 1
    assert hits_at_1("Nolan", ["Christopher Nolan", "Nolan"]) == 1
    assert hits_at_1(ABSTENTION_SENTENCE, ["I"]) == 0


def test_score_exact():
    gold = ["London"]
    assert score_exact("London.", gold, abstained=False) == ACCURATE
    assert score_exact("Paris.", gold, abstained=False) == HALLUCINATED
    assert score_exact("London.", gold, abstained=True) == MISSING


class FixedJudge:
    def __init__(self, verdict):
        self.verdict = verdict
        self.calls = 0

    def judge(self, question, gold_entities, response_text):
        self.calls += 1
        return self.verdict


def test_judge_only_sees_unmatched_responses():
    judge = FixedJudge(ACCURATE)
    assert score_response("q", ["London"], "London", False, judge) == ACCURATE
    assert score_response("q", ["London"], ABSTENTION_SENTENCE, True, judge) == MISSING
    assert judge.calls == 0
    assert score_response("q", ["London"], "the capital of England", False, judge) == ACCURATE
    assert judge.calls == 1
    with pytest.raises(ValueError):
        score_response("q", ["London"], "Paris", False, FixedJudge(5))


def test_exact_match_judge():
    judge = ExactMatchJudge()
    assert judge.judge("q", ["London"], "London") == ACCURATE
    assert judge.judge("q", ["London"], ABSTENTION_SENTENCE) == MISSING


def _record(score, hops=1, hit=None, elapsed=1.0):
    example = QaExample("q", frozenset({"x"}), hops)
    hit = int(score == ACCURATE) if hit is None else hit
    return EvalRecord(example, "r", score == MISSING, score, hit, elapsed)


def test_record_rejects_inconsistent_scores():
    example = QaExample("q", frozenset({"x"}))
    with pytest.raises(ValueError):
        EvalRecord(example, "r", True, ACCURATE, 0)
    with pytest.raises(ValueError):
        EvalRecord(example, "r", False, 2, 0)


def test_aggregate_rates():
    records = [_record(ACCURATE), _record(ACCURATE), _record(HALLUCINATED), _record(MISSING)]
    report = aggregate(records)
    assert report.accuracy == Fraction(1, 2)
    assert report.hallucination == Fraction(1, 4)
    assert report.missing_rate == Fraction(1, 4)
    assert report.truthfulness == Fraction(1, 4)
    assert report.hits_at_1 == Fraction(1, 2)


def test_aggregate_identities():
    records = [_record(s, hops=h) for s, h in [(1, 1), (0, 1), (-1, 2), (1, 2), (1, 3), (0, 3)]]
    report = aggregate(records)
    assert report.accuracy + report.hallucination + report.missing_rate == 1
    assert report.truthfulness == report.accuracy - report.hallucination
    assert report.hits_at_1 <= report.accuracy
    assert sorted(report.per_hop) == [1, 2, 3]
    assert sum(sub.total for sub in report.per_hop.values()) == report.total
    assert report.per_hop[2].hallucination == Fraction(1, 2)


def test_aggregate_latency_and_empty_input():
    report = aggregate([_record(score, elapsed=t) for score, t in [(1, 1.0), (0, 3.0), (0, 8.0)]])
    assert report.latency_mean_s == pytest.approx(4.0)
    assert report.latency_median_s == pytest.approx(3.0)
    with pytest.raises(ValueError):
        aggregate([])


def test_evaluate_answer():
    example = QaExample("who directed Jaws", frozenset({"Steven Spielberg"}), 1)
    answer = Answer(
        "who directed Jaws", "Jaws directed by Steven Spielberg.", False, [], "mock", 0.5
    )
    record = evaluate_answer(example, answer)
    assert (record.score, record.hit_at_1, record.elapsed_s) == (ACCURATE, 1, 0.5)
    refused = Answer("who directed Jaws", ABSTENTION_SENTENCE, True, [], "mock")
    assert evaluate_answer(example, refused).score == MISSING


def test_report_outputs():
    records = [_record(ACCURATE, hops=1), _record(HALLUCINATED, hops=2)]
    report = aggregate(records)
    table = format_table(report)
    assert "1-hop" in table and "2-hop" in table
    assert "truth%" in table
    lines = [json.loads(line) for line in report_lines(report, records)]
    assert [line["record"] for line in lines] == ["question"] * 2 + ["summary"] * 3
    assert lines[2]["scope"] == "all"
    assert lines[2]["truthfulness"] == 0.0


def test_report_frame_rows_and_percentages():
    records = [
        _record(ACCURATE, hops=1),
        _record(ACCURATE, hops=1),
        _record(MISSING, hops=1),
        _record(HALLUCINATED, hops=2),
    ]
    frame = report_frame(aggregate(records))
    assert list(frame.index) == ["all", "1-hop", "2-hop"]
    assert frame.loc["all", "n"] == 4
    assert frame.loc["all", "acc%"] == pytest.approx(50.0)
    assert frame.loc["1-hop", "miss%"] == pytest.approx(100 / 3)
    assert frame.loc["2-hop", "hall%"] == pytest.approx(100.0)
    assert "33.33" in format_table(aggregate(records))
