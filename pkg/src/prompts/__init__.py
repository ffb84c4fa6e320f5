"""
Prompt templates.
"""
from src.prompts.templates import (
    ABSTENTION_SENTENCE,
    NO_CONTEXT_LINE,
    build_answer_prompt,
    build_verbalization_prompt,
    format_context,
    format_triples,
    load_asset,
)

__all__ = [
    "ABSTENTION_SENTENCE",
    "NO_CONTEXT_LINE",
    "build_answer_prompt",
    "build_verbalization_prompt",
    "format_context",
    "format_triples",
    "load_asset",
]
