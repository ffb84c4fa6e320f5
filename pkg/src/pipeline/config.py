"""
Validated run configuration shared by every command.
"""
import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.settings import settings
from src.exceptions import ConfigError
from src.walks.corpus import MAX_SEED, Traversal, WalkConfig

RUN_CONFIG_FILE = "run_config.json"

# Fields that shape the artifacts; they are persisted with them and reused by
# later commands on the same directory.
BUILD_FIELDS = (
    "graph",
    "traversal",
    "depth",
    "num_walks",
    "seed",
    "undirected",
    "embedder",
    "embedding_dimension",
    "embedding_endpoint",
    "embedding_model",
    "verbalizer",
)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    graph: Optional[Path] = None
    out: Path = Path("artifacts")

    # Walks
    traversal: Traversal = Traversal.RW
    depth: int = Field(default=settings.DEFAULT_DEPTH, ge=1)
    num_walks: int = Field(default=settings.DEFAULT_NUM_WALKS, ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    undirected: bool = False

    # Embeddings and retrieval
    embedder: Literal["hashed-bow", "remote"] = "hashed-bow"
    embedding_dimension: int = Field(default=settings.EMBEDDING_DIMENSION, ge=1)
    embedding_endpoint: Optional[str] = None
    embedding_model: Optional[str] = None
    k: int = Field(default=settings.DEFAULT_K, ge=1)

    # LLM
    verbalizer: Literal["template", "llm"] = "template"
    llm_endpoint: Optional[str] = None
    llm_model: Optional[str] = None
    llm_timeout: float = Field(default=settings.LLM_TIMEOUT, gt=0)
    mock_llm: Optional[Literal["echo", "refuse"]] = None
    concurrency: int = Field(default=settings.CONCURRENCY, ge=1)

    # Evaluation
    limit: Optional[int] = Field(default=None, ge=1)
    hops: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _remote_embedder_needs_service(self) -> "RunConfig":
        if self.embedder == "remote" and not (self.embedding_endpoint and self.embedding_model):
            raise ValueError("--embedder remote needs --embedding-endpoint and --embedding-model")
        return self

    def walk_config(self) -> WalkConfig:
        return WalkConfig(
            depth=self.depth,
            num_walks=self.num_walks,
            traversal=self.traversal,
            global_seed=self.seed,
        )

    def provenance(self) -> Dict[str, Any]:
        """Build settings as written beside the artifacts."""
        return self.model_dump(mode="json", include=set(BUILD_FIELDS))

    def with_provenance(self, stored: Dict[str, Any]) -> "RunConfig":
        """This config with the build settings replaced by ``stored`` ones."""
        values = self.model_dump()
        values.update({key: stored[key] for key in BUILD_FIELDS if key in stored})
        return validate_config(**values)


def validate_config(**values: Any) -> RunConfig:
    """
    Build a RunConfig, reporting every invalid value at once.

    Raises:
        ConfigError: A value is missing, out of range or inconsistent.
    """
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from exc


def dump_run_config(config: RunConfig) -> str:
    return json.dumps(config.provenance(), indent=2, sort_keys=True) + "\n"


def load_provenance(text: str) -> Dict[str, Any]:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("run config must be a JSON object")
    return data
