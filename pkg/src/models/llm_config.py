"""
LLM configuration and initialization.
"""
from typing import Optional

from langchain_groq import ChatGroq

from config.settings import settings


def get_groq_llm(
    model: Optional[str] = None,
    temperature: Optional[float] = None,
    max_tokens: Optional[int] = None,
    timeout: Optional[float] = None,
    base_url: Optional[str] = None,
    api_key: Optional[str] = None,
) -> ChatGroq:
    """
    Get configured Groq-compatible chat model.

    Args:
        model: Model identifier; defaults to ``settings.LLM_MODEL``
        temperature: Sampling temperature; defaults to ``settings.DEFAULT_TEMPERATURE``
        max_tokens: Maximum tokens to generate; defaults to ``settings.DEFAULT_MAX_TOKENS``
        timeout: Request timeout in seconds
        base_url: Alternative OpenAI/Groq-compatible endpoint
        api_key: Credential; defaults to the environment

    Returns:
        Configured ChatGroq instance
    """
    api_key = api_key or settings.API_KEY
    if not api_key:
        raise ValueError("KG_RAG_API_KEY (or GROQ_API_KEY) environment variable is not set")

    kwargs = {}
    if base_url:
        kwargs["base_url"] = base_url

    return ChatGroq(
        model=model or settings.LLM_MODEL,
        temperature=settings.DEFAULT_TEMPERATURE if temperature is None else temperature,
        max_tokens=max_tokens or settings.DEFAULT_MAX_TOKENS,
        timeout=timeout or settings.LLM_TIMEOUT,
        max_retries=settings.MAX_RETRIES,
        api_key=api_key,
        **kwargs,
    )
