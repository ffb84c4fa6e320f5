"""
Answer scoring: Hits@1 and the accurate / missing / hallucinated scale.
"""
import re
from typing import Iterable, Optional, Protocol, runtime_checkable

from src.agents.abstention import is_abstention

ACCURATE = 1
MISSING = 0
HALLUCINATED = -1
SCORES = (ACCURATE, MISSING, HALLUCINATED)


def _mentions(response: str, entity: str) -> bool:
    entity = entity.strip().casefold()
    if not entity:
        return False
    return re.search(rf"(?<!\w){re.escape(entity)}(?!\w)", response.casefold()) is not None


def hits_at_1(response_text: str, gold_entities: Iterable[str]) -> int:
    """1 if a gold entity occurs in the response on token boundaries (case-insensitive)."""
    if is_abstention(response_text):
        return 0
    return int(any(_mentions(response_text, entity) for entity in gold_entities))


def score_exact(response_text: str, gold_entities: Iterable[str], abstained: bool) -> int:
    if abstained:
        return MISSING
    return ACCURATE if hits_at_1(response_text, gold_entities) else HALLUCINATED


@runtime_checkable
class AnswerJudge(Protocol):
    """Scores a response as 1 (accurate), 0 (missing) or -1 (hallucinated)."""

    def judge(self, question: str, gold_entities: Iterable[str], response_text: str) -> int:
        ...


class ExactMatchJudge:
    def judge(self, question: str, gold_entities: Iterable[str], response_text: str) -> int:
        return score_exact(response_text, gold_entities, is_abstention(response_text))


def score_response(
    question: str,
    gold_entities: Iterable[str],
    response_text: str,
    abstained: bool,
    judge: Optional[AnswerJudge] = None,
) -> int:
    """
    Exact matching first; responses that neither abstain nor match are
    passed to ``judge`` when one is given, and count as hallucinated otherwise.
    """
    gold = list(gold_entities)
    score = score_exact(response_text, gold, abstained)
    if score != HALLUCINATED or judge is None:
        return score
    verdict = judge.judge(question, gold, response_text)
    if verdict not in SCORES:
        raise ValueError(f"judge returned {verdict!r}, expected one of {SCORES}")
    return verdict
