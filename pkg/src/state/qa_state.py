"""
State definitions for the question answering workflow.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from src.retrieval.retriever import RetrievalResult


@dataclass
class QAState:
    """State object that tracks one question through the workflow."""

    # Input
    question: str = ""
    k: int = 3
    temperature: float = 0.0

    # Retrieval; preset to answer again without re-retrieving
    retrieval: Optional[RetrievalResult] = None

    # Prompt and response
    system_text: str = ""
    human_text: str = ""
    response_text: str = ""
    abstained: bool = False

    # Set when the LLM call failed
    error: Optional[str] = None


@dataclass
class Answer:
    """Final answer for one question."""

    question: str
    response_text: str
    abstained: bool
    context_used: List[str]
    llm_model: str
    elapsed_s: float = 0.0
    retrieval: Optional[RetrievalResult] = None

    @property
    def context_keys(self) -> List[str]:
        return self.retrieval.walk_keys if self.retrieval is not None else []

    def to_record(self) -> Dict[str, Any]:
        """Answer-log record."""
        return {
            "question": self.question,
            "response": self.response_text,
            "abstained": self.abstained,
            "k": self.retrieval.k if self.retrieval is not None else None,
            "model": self.llm_model,
            "context_walk_keys": self.context_keys,
            "elapsed_s": round(self.elapsed_s, 6),
        }
