"""
Benchmark loading, answer scoring and report aggregation.
"""
from src.evaluation.metaqa import QaExample, hop_count_from_path, load_metaqa, parse_metaqa
from src.evaluation.metrics import (
    AnswerJudge,
    ExactMatchJudge,
    hits_at_1,
    score_exact,
    score_response,
)
from src.evaluation.report import (
    EvalRecord,
    EvalReport,
    aggregate,
    evaluate_answer,
    format_table,
    report_frame,
    report_lines,
)

__all__ = [
    "AnswerJudge",
    "EvalRecord",
    "EvalReport",
    "ExactMatchJudge",
    "QaExample",
    "aggregate",
    "evaluate_answer",
    "format_table",
    "hits_at_1",
    "hop_count_from_path",
    "load_metaqa",
    "parse_metaqa",
    "report_frame",
    "report_lines",
    "score_exact",
    "score_response",
]
