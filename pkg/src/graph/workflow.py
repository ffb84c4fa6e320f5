"""
LangGraph workflow for retrieval-augmented question answering.
"""
import time
from typing import List, Mapping, Optional, Sequence, Union

import structlog
from langgraph.graph import END, StateGraph

from config.settings import settings
from src.agents.nodes import QANodes
from src.agents.parallel import run_parallel
from src.agents.routes import route_after_generation
from src.exceptions import AnswerError
from src.index.embedders import Embedder
from src.index.vector_index import EmbeddingIndex
from src.models.llm_client import LlmClient
from src.retrieval.retriever import RetrievalResult
from src.state.qa_state import Answer, QAState
from src.verbalizer.cache import VerbalizedWalk

logger = structlog.get_logger(__name__)


class AnswerWorkflow:
    """
    Workflow manager for the answer pipeline:
    retrieve -> build_prompt -> generate -> classify_abstention.
    """

    def __init__(
        self,
        index: EmbeddingIndex,
        verbalizations: Mapping[str, VerbalizedWalk],
        embedder: Embedder,
        client: LlmClient,
        k: int = 3,
        temperature: Optional[float] = None,
    ):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.client = client
        self.k = k
        self.temperature = settings.DEFAULT_TEMPERATURE if temperature is None else temperature
        self.nodes = QANodes(index, verbalizations, embedder, client)
        self.workflow = self._create_workflow()

    def _create_workflow(self):
        """Create and compile the workflow graph."""
        workflow = StateGraph(QAState)

        workflow.add_node("retrieve", self.nodes.retrieve)
        workflow.add_node("build_prompt", self.nodes.build_prompt)
        workflow.add_node("generate", self.nodes.generate)
        workflow.add_node("classify_abstention", self.nodes.classify_abstention)

        workflow.set_entry_point("retrieve")
        workflow.add_edge("retrieve", "build_prompt")
        workflow.add_edge("build_prompt", "generate")
        workflow.add_conditional_edges(
            "generate",
            route_after_generation,
            {"classify_abstention": "classify_abstention", END: END},
        )
        workflow.add_edge("classify_abstention", END)

        return workflow.compile()

    def answer(self, question: str, retrieval: Optional[RetrievalResult] = None) -> Answer:
        """
        Answer one question with exactly one LLM call.

        Args:
            question: Natural-language question.
            retrieval: Earlier retrieval for the same question, reused as is.

        Returns:
            Answer with the response, abstention flag and context sent.

        Raises:
            AnswerError: The LLM call failed; ``retrieval`` is attached.
        """
        started = time.perf_counter()
        state = QAState(
            question=question, k=self.k, temperature=self.temperature, retrieval=retrieval
        )
        result = self.workflow.invoke(state)
        if not isinstance(result, dict):
            result = vars(result)
        elapsed = time.perf_counter() - started

        if result.get("error") is not None:
            raise AnswerError(f"answer generation failed: {result['error']}", result["retrieval"])

        answer = Answer(
            question=question,
            response_text=result["response_text"],
            abstained=result["abstained"],
            context_used=result["retrieval"].context,
            llm_model=self.client.model,
            elapsed_s=elapsed,
            retrieval=result["retrieval"],
        )
        logger.info(
            "question_answered",
            abstained=answer.abstained,
            context=len(answer.context_used),
            elapsed_s=round(elapsed, 4),
        )
        return answer

    def answer_batch(
        self, questions: Sequence[str], concurrency: Optional[int] = None
    ) -> List[Union[Answer, BaseException]]:
        """Answer questions in parallel; failures are returned in place of answers."""
        return run_parallel(questions, self.answer, concurrency or settings.CONCURRENCY)
