"""
Agent nodes for the question answering workflow.

Each node reads the ``QAState`` and returns the fields it updates.
"""
from dataclasses import dataclass
from typing import Any, Dict, Mapping

import structlog

from src.agents.abstention import is_abstention
from src.exceptions import LlmClientError
from src.index.embedders import Embedder
from src.index.vector_index import EmbeddingIndex
from src.models.llm_client import LlmClient
from src.prompts.templates import build_answer_prompt
from src.retrieval.retriever import retrieve
from src.state.qa_state import QAState
from src.verbalizer.cache import VerbalizedWalk

logger = structlog.get_logger(__name__)


@dataclass
class QANodes:
    """Workflow nodes bound to the retrieval inputs and the LLM client."""

    index: EmbeddingIndex
    verbalizations: Mapping[str, VerbalizedWalk]
    embedder: Embedder
    client: LlmClient

    def retrieve(self, state: QAState) -> Dict[str, Any]:
        """Retrieve context nodes and walks unless a retrieval is already attached."""
        if state.retrieval is not None:
            return {"retrieval": state.retrieval}
        result = retrieve(state.question, self.index, self.verbalizations, self.embedder, state.k)
        return {"retrieval": result}

    def build_prompt(self, state: QAState) -> Dict[str, Any]:
        system_text, human_text = build_answer_prompt(state.question, state.retrieval.context)
        return {"system_text": system_text, "human_text": human_text}

    def generate(self, state: QAState) -> Dict[str, Any]:
        """The single LLM call of a question."""
        try:
            response = self.client.send(state.system_text, state.human_text, state.temperature)
        except LlmClientError as exc:
            logger.warning("answer_generation_failed", question=state.question, error=str(exc))
            return {"error": str(exc)}
        return {"response_text": (response or "").strip()}

    def classify_abstention(self, state: QAState) -> Dict[str, Any]:
        return {"abstained": is_abstention(state.response_text)}
