"""
End-to-end artifact pipeline.
"""
from src.pipeline.artifacts import (
    KnowledgeArtifacts,
    UpdateCounts,
    artifact_lock,
    build_artifacts,
    build_index,
    load_artifacts,
    save_artifacts,
    update_artifacts,
)
from src.pipeline.config import RunConfig, validate_config

__all__ = [
    "KnowledgeArtifacts",
    "RunConfig",
    "UpdateCounts",
    "artifact_lock",
    "build_artifacts",
    "build_index",
    "load_artifacts",
    "save_artifacts",
    "update_artifacts",
    "validate_config",
]
