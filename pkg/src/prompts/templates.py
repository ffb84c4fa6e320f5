"""
Prompt templates for walk verbalization and answer generation.

The template text lives in the ``*.txt`` assets next to this module and is
used byte-for-byte.
"""
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence, Tuple

from langchain_core.prompts import ChatPromptTemplate

from src.kg.graph import Edge

PROMPT_DIR = Path(__file__).resolve().parent
NO_CONTEXT_LINE = "No context retrieved."
ABSTENTION_SENTENCE = "I do not know the answer"


def load_asset(name: str) -> str:
    return (PROMPT_DIR / name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def verbalization_template() -> ChatPromptTemplate:
    return ChatPromptTemplate.from_messages(
        [
            ("system", load_asset("verbalization_system.txt")),
            ("human", load_asset("verbalization_human.txt")),
        ]
    )


@lru_cache(maxsize=None)
def answer_template() -> ChatPromptTemplate:
    return ChatPromptTemplate.from_messages(
        [
            ("system", load_asset("answer_system.txt")),
            ("human", load_asset("answer_human.txt")),
        ]
    )


def format_triples(triples: Iterable[Edge]) -> str:
    """``(head, relation, tail)`` tuples in walk order, comma-separated."""
    return ", ".join(f"({h}, {r}, {t})" for h, r, t in triples)


def format_context(context: Sequence[str]) -> str:
    """Number the context texts ``1. ...`` one per line."""
    if not context:
        return NO_CONTEXT_LINE
    return "\n".join(f"{i}. {text}" for i, text in enumerate(context, start=1))


def build_verbalization_prompt(triples: Iterable[Edge]) -> Tuple[str, str]:
    """(system_text, human_text) asking the LLM to verbalize one walk."""
    system, human = verbalization_template().format_messages(triples=format_triples(triples))
    return system.content, human.content


def build_answer_prompt(question: str, context: Sequence[str]) -> Tuple[str, str]:
    """
    (system_text, human_text) for answering ``question`` from ``context``.

    Values are substituted in a single pass, so braces inside the question
    or the context are kept literally.
    """
    system, human = answer_template().format_messages(
        question=question, context=format_context(context)
    )
    return system.content, human.content
