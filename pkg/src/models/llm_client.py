"""
Chat-completion client abstraction with a Groq implementation and offline mocks.
"""
import re
from typing import Dict, Optional, Protocol, runtime_checkable

import groq
import structlog
from langchain_core.messages import HumanMessage, SystemMessage

from config.settings import settings
from src.exceptions import LlmClientError
from src.models.llm_config import get_groq_llm
from src.prompts.templates import ABSTENTION_SENTENCE, NO_CONTEXT_LINE, load_asset

logger = structlog.get_logger(__name__)


@runtime_checkable
class LlmClient(Protocol):
    """Sends one system + human prompt pair and returns the response text."""

    model: str
    timeout: Optional[float]

    def send(self, system_text: str, human_text: str, temperature: float = 0.0) -> str:
        ...


class GroqLlmClient:
    """LlmClient backed by ``ChatGroq``; prompts are passed through unmodified."""

    def __init__(
        self,
        model: Optional[str] = None,
        timeout: Optional[float] = None,
        base_url: Optional[str] = None,
        api_key: Optional[str] = None,
    ):
        self._options = {"timeout": timeout, "base_url": base_url, "api_key": api_key}
        self._models: Dict[float, object] = {}
        self.timeout = timeout
        self.model = model or settings.LLM_MODEL

    def _chat(self, temperature: float):
        if temperature not in self._models:
            try:
                self._models[temperature] = get_groq_llm(
                    model=self.model, temperature=temperature, **self._options
                )
            except ValueError as exc:
                raise LlmClientError(str(exc), retryable=False) from exc
        return self._models[temperature]

    def send(self, system_text: str, human_text: str, temperature: float = 0.0) -> str:
        messages = [SystemMessage(content=system_text), HumanMessage(content=human_text)]
        try:
            response = self._chat(temperature).invoke(messages)
        except groq.APIStatusError as exc:
            retryable = exc.status_code == 429 or exc.status_code >= 500
            raise LlmClientError(f"LLM request failed: {exc}", retryable=retryable) from exc
        except groq.APIError as exc:
            raise LlmClientError(f"LLM transport error: {exc}", retryable=True) from exc
        return response.content if isinstance(response.content, str) else str(response.content)


_HUMAN_TEMPLATE = load_asset("answer_human.txt")
_CONTEXT_MARKER = _HUMAN_TEMPLATE.split("{question}", 1)[1].split("{context}", 1)[0]
_CONTEXT_SUFFIX = _HUMAN_TEMPLATE.split("{context}", 1)[1]
_NUMBERED = re.compile(r"^\d+\.\s")


def first_context_line(human_text: str) -> Optional[str]:
    """The first numbered context line of an answer prompt, without its number."""
    start = human_text.rfind(_CONTEXT_MARKER)
    if start < 0:
        return None
    body = human_text[start + len(_CONTEXT_MARKER):]
    if _CONTEXT_SUFFIX and body.endswith(_CONTEXT_SUFFIX):
        body = body[: -len(_CONTEXT_SUFFIX)]
    if body == NO_CONTEXT_LINE:
        return None
    return _NUMBERED.sub("", body.split("\n", 1)[0], count=1)


class EchoLlmClient:
    """Answers with the first context line; abstains when nothing was retrieved."""

    model = "mock-echo"
    timeout = None

    def send(self, system_text: str, human_text: str, temperature: float = 0.0) -> str:
        line = first_context_line(human_text)
        return line if line is not None else ABSTENTION_SENTENCE


class RefuseLlmClient:
    """Always abstains."""

    model = "mock-refuse"
    timeout = None

    def send(self, system_text: str, human_text: str, temperature: float = 0.0) -> str:
        return ABSTENTION_SENTENCE


MOCK_CLIENTS = {"echo": EchoLlmClient, "refuse": RefuseLlmClient}


def build_llm_client(
    mock: Optional[str] = None,
    model: Optional[str] = None,
    endpoint: Optional[str] = None,
    timeout: Optional[float] = None,
) -> LlmClient:
    """Mock client when ``mock`` is set, otherwise a Groq-compatible client."""
    if mock:
        logger.info("llm_client_selected", client=mock)
        return MOCK_CLIENTS[mock]()
    client = GroqLlmClient(model=model, timeout=timeout, base_url=endpoint)
    logger.info("llm_client_selected", client="groq", model=client.model, endpoint=endpoint)
    return client
