"""
Walk verbalization through an LLM, with a deterministic template fallback.
"""
import re
from typing import List, Optional

import structlog

from config.settings import settings
from src.agents.parallel import run_parallel
from src.exceptions import EmptyWalkError, LlmClientError, VerbalizationError
from src.models.llm_client import LlmClient
from src.prompts.templates import build_verbalization_prompt
from src.verbalizer.cache import VerbalizationCache, VerbalizationMethod, VerbalizedWalk
from src.walks.corpus import Corpus, Walk

logger = structlog.get_logger(__name__)

_WORD_BREAK = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])|[_\s]+")


def relation_words(relation: str) -> str:
    """``writtenBy`` / ``written_by`` -> ``written by``."""
    return " ".join(part.lower() for part in _WORD_BREAK.split(relation) if part)


def verbalize_template(w: Walk) -> VerbalizedWalk:
    """
    Render a walk as ``"h1 rel words t1, and t1 rel words t2."``.

    Raises:
        EmptyWalkError: The walk has no steps.
    """
    if not w.steps:
        raise EmptyWalkError(f"walk rooted at {w.root!r} has no steps")
    segments = [f"{h} {relation_words(r)} {t}" for h, r, t in w.triples()]
    return VerbalizedWalk(w.key, ", and ".join(segments) + ".", VerbalizationMethod.TEMPLATE)


def verbalize_llm(
    w: Walk, client: LlmClient, temperature: Optional[float] = None
) -> VerbalizedWalk:
    """
    Verbalize one walk with the LLM prompt.

    Retryable client failures and empty responses degrade to the template
    rendering; other client errors propagate.
    """
    if not w.steps:
        raise EmptyWalkError(f"walk rooted at {w.root!r} has no steps")
    if temperature is None:
        temperature = settings.DEFAULT_TEMPERATURE
    system_text, human_text = build_verbalization_prompt(w.triples())
    try:
        response = client.send(system_text, human_text, temperature)
    except LlmClientError as exc:
        if not exc.retryable:
            raise
        logger.warning("verbalization_fallback", walk_key=w.key, reason=str(exc))
        return verbalize_template(w)

    text = (response or "").strip()
    if not text:
        logger.warning("verbalization_fallback", walk_key=w.key, reason="empty response")
        return verbalize_template(w)
    return VerbalizedWalk(w.key, text, VerbalizationMethod.LLM)


def verbalize_corpus(
    c: Corpus,
    client: Optional[LlmClient] = None,
    cache: Optional[VerbalizationCache] = None,
    concurrency: Optional[int] = None,
) -> VerbalizationCache:
    """
    Verbalize every distinct walk with at least one step exactly once.

    Walks already present in ``cache`` are skipped, so re-running after an
    incremental update only verbalizes new walks. The cache is updated in
    place and returned.

    Raises:
        VerbalizationError: A non-retryable client error; carries the number
            of verbalizations completed in this run.
    """
    cache = cache if cache is not None else VerbalizationCache()
    pending: List[Walk] = [w for w in c.verbalizable_walks() if w.key not in cache]
    if not pending:
        return cache

    if client is None:
        for walk in pending:
            cache.put(verbalize_template(walk))
        logger.info("corpus_verbalized", method="template", new=len(pending), cached=len(cache))
        return cache

    def work(walk: Walk) -> VerbalizedWalk:
        result = verbalize_llm(walk, client)
        cache.put(result)
        return result

    results = run_parallel(pending, work, concurrency or settings.CONCURRENCY)
    failures = [r for r in results if isinstance(r, BaseException)]
    completed = len(results) - len(failures)
    if failures:
        raise VerbalizationError(f"verbalization failed: {failures[0]}", completed) from failures[0]
    logger.info(
        "corpus_verbalized", method="llm", new=completed, cached=len(cache), model=client.model
    )
    return cache
