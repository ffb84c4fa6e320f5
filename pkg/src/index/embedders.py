"""
Text embedders.

Every embedder is deterministic (same text, same vector) and also implements
the langchain ``Embeddings`` interface.
"""
import re
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import numpy as np
import requests
import structlog
from langchain_core.embeddings import Embeddings

from src.exceptions import EmbeddingServiceError

logger = structlog.get_logger(__name__)

_TOKEN = re.compile(r"[^\W_]+")
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class Embedder(Embeddings, ABC):
    """Maps text to a fixed-dimension float32 vector."""

    identifier: str
    dimension: int

    @abstractmethod
    def embed(self, text: str) -> np.ndarray:
        ...

    def embed_many(self, texts: Sequence[str]) -> List[np.ndarray]:
        return [self.embed(text) for text in texts]

    def embed_query(self, text: str) -> List[float]:
        return self.embed(text).tolist()

    def embed_documents(self, texts: List[str]) -> List[List[float]]:
        return [vector.tolist() for vector in self.embed_many(texts)]


class HashedBowEmbedder(Embedder):
    """
    Signed hashed bag of words.

    Tokens are maximal alphanumeric runs, lowercased; each adds +/-1 (sign
    from the top bit of its FNV-1a hash) at ``hash mod D``. The result is
    L2-normalized; text without tokens maps to the zero vector.
    """

    def __init__(self, dimension: int = 256):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.identifier = f"hashed-bow-{dimension}"

    def embed(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN.findall(text.lower()):
            h = fnv1a_64(token.encode("utf-8"))
            vector[h % self.dimension] += -1.0 if h >> 63 else 1.0
        norm = np.linalg.norm(vector)
        if norm == 0:
            return np.zeros(self.dimension, dtype=np.float32)
        return (vector / norm).astype(np.float32)


def embed_hashed_bow(text: str, dimension: int = 256) -> np.ndarray:
    return HashedBowEmbedder(dimension).embed(text)


class RemoteEmbedder(Embedder):
    """Client for an OpenAI-compatible ``/embeddings`` endpoint."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: Optional[str] = None,
        timeout: float = 60.0,
        dimension: Optional[int] = None,
        batch_size: int = 64,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.batch_size = batch_size
        self.identifier = f"remote:{model}"
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        if self._dimension is None:
            self._dimension = len(self._request(["dimension check"])[0])
        return self._dimension

    def _request(self, texts: List[str]) -> List[np.ndarray]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                f"{self.endpoint}/embeddings",
                json={"model": self.model, "input": texts},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            data = sorted(response.json()["data"], key=lambda item: item["index"])
        except requests.exceptions.RequestException as exc:
            raise EmbeddingServiceError(f"embedding request failed: {exc}") from exc
        except (KeyError, ValueError, TypeError) as exc:
            raise EmbeddingServiceError(f"malformed embedding response: {exc}") from exc
        vectors = [np.asarray(item["embedding"], dtype=np.float32) for item in data]
        if len(vectors) != len(texts):
            raise EmbeddingServiceError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        return vectors

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> List[np.ndarray]:
        vectors: List[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            vectors.extend(self._request(list(texts[start:start + self.batch_size])))
        if vectors and self._dimension is None:
            self._dimension = len(vectors[0])
        logger.debug("texts_embedded", count=len(texts), model=self.model)
        return vectors


def build_embedder(
    kind: str,
    dimension: int = 256,
    endpoint: Optional[str] = None,
    model: Optional[str] = None,
    api_key: Optional[str] = None,
) -> Embedder:
    if kind == "hashed-bow":
        return HashedBowEmbedder(dimension)
    if kind == "remote":
        if not endpoint or not model:
            raise ValueError("remote embedder needs an endpoint and a model")
        return RemoteEmbedder(endpoint, model, api_key=api_key)
    raise ValueError(f"unknown embedder {kind!r}")
