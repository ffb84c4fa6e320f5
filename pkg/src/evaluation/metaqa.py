"""
Loader for MetaQA-style question files.

Each line is ``question with [topic entity]<TAB>answer1|answer2|...``.
"""
import re
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, List, Optional, Union

from src.exceptions import ParseError
from src.kg.parsers import read_text_file

_HOP_MARKER = re.compile(r"(\d+)[-_]?hop", re.IGNORECASE)


@dataclass(frozen=True)
class QaExample:
    question: str
    gold_entities: FrozenSet[str]
    hop_count: Optional[int] = None

    def __post_init__(self):
        if not self.gold_entities:
            raise ValueError("a QA example needs at least one gold entity")


def parse_metaqa(text: str, hop_count: Optional[int] = None) -> List[QaExample]:
    """Parse question lines; blank lines are skipped, order is preserved."""
    examples: List[QaExample] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ParseError("expected question<TAB>answers", number)
        question, answers = line.split("\t", 1)
        gold = frozenset(a.strip() for a in answers.split("|") if a.strip())
        if not gold:
            raise ParseError("empty answer list", number)
        question = " ".join(question.replace("[", "").replace("]", "").split())
        examples.append(QaExample(question, gold, hop_count))
    return examples


def hop_count_from_path(path: Union[str, Path]) -> Optional[int]:
    """``.../2-hop/vanilla/qa_test.txt`` -> 2."""
    match = _HOP_MARKER.search(str(path))
    return int(match.group(1)) if match else None


def load_metaqa(path: Union[str, Path], hop_count: Optional[int] = None) -> List[QaExample]:
    """
    Load a question file.

    Args:
        path: Question file.
        hop_count: Hop tag for every example; defaults to the ``Nhop``
            marker in the path, if any.
    """
    if hop_count is None:
        hop_count = hop_count_from_path(path)
    return parse_metaqa(read_text_file(path), hop_count)
