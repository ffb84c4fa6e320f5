"""
Configuration settings for the application.
"""
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value else default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value else default


@dataclass
class Settings:
    """Application settings resolved from the environment."""

    # API Configuration
    API_KEY: str = field(
        default_factory=lambda: os.getenv("KG_RAG_API_KEY") or os.getenv("GROQ_API_KEY", "")
    )
    LLM_MODEL: str = field(
        default_factory=lambda: os.getenv("KG_RAG_LLM_MODEL", "llama-3.3-70b-versatile")
    )
    EMBEDDING_API_KEY: str = field(
        default_factory=lambda: (
            os.getenv("KG_RAG_EMBEDDING_API_KEY") or os.getenv("KG_RAG_API_KEY", "")
        )
    )

    # LLM Parameters
    DEFAULT_TEMPERATURE: float = 0.0
    DEFAULT_MAX_TOKENS: int = 1024
    LLM_TIMEOUT: float = field(default_factory=lambda: _env_float("KG_RAG_LLM_TIMEOUT", 60.0))
    MAX_RETRIES: int = field(default_factory=lambda: _env_int("KG_RAG_MAX_RETRIES", 3))

    # Parallel client calls during verbalization and batch answering
    CONCURRENCY: int = field(default_factory=lambda: _env_int("KG_RAG_CONCURRENCY", 4))

    # Corpus / retrieval defaults
    DEFAULT_K: int = 3
    DEFAULT_NUM_WALKS: int = 60
    DEFAULT_DEPTH: int = 4
    EMBEDDING_DIMENSION: int = 256

    LOG_LEVEL: str = field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))


settings = Settings()
