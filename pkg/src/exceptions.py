"""
Exception hierarchy shared by every subsystem.
"""
from typing import Any, Optional


class KGRagError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(KGRagError, ValueError):
    """Invalid configuration or command-line usage."""


class ParseError(KGRagError):
    """Malformed input document."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class UnsupportedFeatureError(ParseError):
    """Input uses a feature outside the supported subset (e.g. blank nodes)."""


class NodeNotFoundError(KGRagError, KeyError):
    """Referenced node is not part of the graph."""

    def __str__(self) -> str:
        return f"unknown node: {self.args[0]!r}" if self.args else "unknown node"


class EdgeNotFoundError(KGRagError, KeyError):
    """Referenced edge is not part of the graph."""

    def __str__(self) -> str:
        return f"unknown edge: {self.args[0]!r}" if self.args else "unknown edge"


class StaleCorpusError(KGRagError):
    """Corpus was generated from a different graph than the one supplied."""


class EmptyWalkError(KGRagError):
    """A zero-step walk cannot be verbalized."""


class DimensionMismatchError(KGRagError, ValueError):
    """Vectors of different dimensions were combined."""


class EmptyIndexError(KGRagError):
    """Retrieval was attempted against an index without node vectors."""


class UnknownOwnerError(KGRagError, KeyError):
    """A walk vector references an owner node missing from the index."""


class IndexEntryNotFoundError(KGRagError, KeyError):
    """Removal of an id the index does not hold."""


class EmbeddingServiceError(KGRagError):
    """Failure talking to a remote embedding service."""


class CacheConflictError(KGRagError):
    """Two different verbalizations were offered for the same walk key."""


class LlmClientError(KGRagError):
    """Failure talking to a language-model service."""

    def __init__(self, message: str, retryable: bool = True):
        self.retryable = retryable
        super().__init__(message)


class VerbalizationError(KGRagError):
    """Unrecoverable client failure during corpus verbalization."""

    def __init__(self, message: str, completed: int):
        self.completed = completed
        super().__init__(f"{message} (completed {completed} verbalizations)")


class AnswerError(KGRagError):
    """Answer generation failed; carries the retrieval so it can be retried."""

    def __init__(self, message: str, retrieval: Any = None):
        self.retrieval = retrieval
        super().__init__(message)


class ArtifactError(KGRagError):
    """Artifact directory missing, incomplete or locked by another run."""
