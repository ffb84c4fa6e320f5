from src.retrieval.retriever import RetrievalResult, RetrievedWalk, retrieve

__all__ = ["RetrievalResult", "RetrievedWalk", "retrieve"]
