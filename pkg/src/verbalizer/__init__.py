"""
Walk verbalization.
"""
from src.verbalizer.cache import VerbalizationCache, VerbalizationMethod, VerbalizedWalk
from src.verbalizer.verbalizer import (
    relation_words,
    verbalize_corpus,
    verbalize_llm,
    verbalize_template,
)

__all__ = [
    "VerbalizationCache",
    "VerbalizationMethod",
    "VerbalizedWalk",
    "relation_words",
    "verbalize_corpus",
    "verbalize_llm",
    "verbalize_template",
]
