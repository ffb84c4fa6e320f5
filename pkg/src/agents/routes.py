"""
Conditional routing logic for the answer workflow.
"""
from langgraph.graph import END

from src.state.qa_state import QAState


def route_after_generation(state: QAState) -> str:
    """Stop when the LLM call failed, otherwise classify the response."""
    if state.error is not None:
        return END
    return "classify_abstention"
