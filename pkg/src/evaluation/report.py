"""
Evaluation records and aggregate reports.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import fmean, median
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.evaluation.metaqa import QaExample
from src.evaluation.metrics import (
    ACCURATE,
    HALLUCINATED,
    MISSING,
    SCORES,
    AnswerJudge,
    hits_at_1,
    score_response,
)
from src.state.qa_state import Answer


@dataclass(frozen=True)
class EvalRecord:
    example: QaExample
    response_text: str
    abstained: bool
    score: int
    hit_at_1: int
    elapsed_s: float = 0.0

    def __post_init__(self):
        if self.score not in SCORES:
            raise ValueError(f"score must be one of {SCORES}")
        if self.abstained and self.score != MISSING:
            raise ValueError("an abstained response must score 0")

    def to_record(self) -> Dict[str, Any]:
        return {
            "record": "question",
            "question": self.example.question,
            "gold": sorted(self.example.gold_entities),
            "hops": self.example.hop_count,
            "response": self.response_text,
            "abstained": self.abstained,
            "score": self.score,
            "hit_at_1": self.hit_at_1,
            "elapsed_s": round(self.elapsed_s, 6),
        }


def evaluate_answer(
    example: QaExample, answer: Answer, judge: Optional[AnswerJudge] = None
) -> EvalRecord:
    score = score_response(
        example.question, example.gold_entities, answer.response_text, answer.abstained, judge
    )
    return EvalRecord(
        example=example,
        response_text=answer.response_text,
        abstained=answer.abstained,
        score=score,
        hit_at_1=0 if answer.abstained else hits_at_1(answer.response_text, example.gold_entities),
        elapsed_s=answer.elapsed_s,
    )


@dataclass
class EvalReport:
    """Exact rates over a set of records; percentages are derived for display only."""

    total: int
    accurate: int
    hallucinated: int
    missing: int
    hits: int
    latency_mean_s: float = 0.0
    latency_median_s: float = 0.0
    per_hop: Dict[int, "EvalReport"] = field(default_factory=dict)

    @property
    def accuracy(self) -> Fraction:
        return Fraction(self.accurate, self.total)

    @property
    def hallucination(self) -> Fraction:
        return Fraction(self.hallucinated, self.total)

    @property
    def missing_rate(self) -> Fraction:
        return Fraction(self.missing, self.total)

    @property
    def truthfulness(self) -> Fraction:
        return self.accuracy - self.hallucination

    @property
    def hits_at_1(self) -> Fraction:
        return Fraction(self.hits, self.total)

    def rates(self) -> Dict[str, float]:
        return {
            "accuracy": float(self.accuracy),
            "hallucination": float(self.hallucination),
            "missing": float(self.missing_rate),
            "truthfulness": float(self.truthfulness),
            "hits_at_1": float(self.hits_at_1),
        }

    def to_record(self, scope: str = "all") -> Dict[str, Any]:
        return {
            "record": "summary",
            "scope": scope,
            "total": self.total,
            **self.rates(),
            "latency_mean_s": round(self.latency_mean_s, 6),
            "latency_median_s": round(self.latency_median_s, 6),
        }


def _tally(records: Sequence[EvalRecord]) -> EvalReport:
    latencies = [r.elapsed_s for r in records]
    return EvalReport(
        total=len(records),
        accurate=sum(r.score == ACCURATE for r in records),
        hallucinated=sum(r.score == HALLUCINATED for r in records),
        missing=sum(r.score == MISSING for r in records),
        hits=sum(r.hit_at_1 for r in records),
        latency_mean_s=fmean(latencies),
        latency_median_s=median(latencies),
    )


def aggregate(records: Sequence[EvalRecord]) -> EvalReport:
    """
    Fold records into a report, with a sub-report per hop tag.

    Raises:
        ValueError: ``records`` is empty.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    report = _tally(records)
    hops = sorted({r.example.hop_count for r in records if r.example.hop_count is not None})
    for hop in hops:
        report.per_hop[hop] = _tally([r for r in records if r.example.hop_count == hop])
    return report


def report_frame(report: EvalReport) -> pd.DataFrame:
    """One row for all questions and one per hop tag; rates in percent."""
    scopes = [("all", report)]
    scopes += [(f"{hop}-hop", sub) for hop, sub in sorted(report.per_hop.items())]
    rows = [
        {
            "scope": scope,
            "n": sub.total,
            "acc%": float(sub.accuracy) * 100,
            "hall%": float(sub.hallucination) * 100,
            "miss%": float(sub.missing_rate) * 100,
            "truth%": float(sub.truthfulness) * 100,
            "hits@1%": float(sub.hits_at_1) * 100,
            "mean_s": sub.latency_mean_s,
            "median_s": sub.latency_median_s,
        }
        for scope, sub in scopes
    ]
    return pd.DataFrame(rows).set_index("scope")


def format_table(report: EvalReport) -> str:
    return report_frame(report).to_string(float_format="{:.2f}".format)


def report_lines(report: EvalReport, records: Sequence[EvalRecord]) -> List[str]:
    """JSON lines: one per question, then the summaries."""
    out = [json.dumps(r.to_record(), ensure_ascii=False, sort_keys=True) for r in records]
    out.append(json.dumps(report.to_record(), sort_keys=True))
    for hop, sub in sorted(report.per_hop.items()):
        out.append(json.dumps(sub.to_record(f"{hop}-hop"), sort_keys=True))
    return out
