"""
Detection of the designated abstention sentence in LLM responses.
"""
import re

from src.prompts.templates import ABSTENTION_SENTENCE

_EDGE_CHARS = " \t\r\n\"'`“”‘’"
_TRAILING = _EDGE_CHARS + ".!?;:"
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+|\n+")
_TARGET = ABSTENTION_SENTENCE.casefold()


def _normalize(text: str) -> str:
    return text.strip(_EDGE_CHARS).casefold().rstrip(_TRAILING).lstrip(_EDGE_CHARS)


def is_abstention(response_text: str) -> bool:
    """
    True if the response is the abstention sentence, or opens with it as a
    complete first sentence. Case, surrounding whitespace, quotes and
    terminal punctuation are ignored.
    """
    if _normalize(response_text) == _TARGET:
        return True
    first = _SENTENCE_END.split(response_text.strip(), maxsplit=1)[0]
    return _normalize(first) == _TARGET
