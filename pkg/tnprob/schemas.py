"""Pydantic schemas for model files, run manifests and verification reports."""

from datetime import datetime
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

FamilyTag = Literal["ugm", "bm", "dbm", "lps"]
MixtureTag = Literal["ugm", "dbm"]


# =============================================================================
# Networks and models
# =============================================================================


class EdgeDocument(BaseModel):
    """One edge: a single endpoint makes it visible, two make it hidden."""

    id: str
    endpoints: list[str] = Field(min_length=1)
    dim: int = Field(ge=1)


class NodeDocument(BaseModel):
    """A node with its ordered incident edges and core as nested [re, im] pairs."""

    id: str
    incident: list[str]
    shape: list[int]
    core: Any


class NetworkDocument(BaseModel):
    """Schema for a serialized tensor network."""

    nodes: list[NodeDocument]
    edges: list[EdgeDocument]
    visible_order: list[str]


class ModelDocument(BaseModel):
    """Schema for a model file: a network plus its family tag and metadata."""

    format: Literal["tnprob-model"] = "tnprob-model"
    version: int = 1
    family: FamilyTag
    network: NetworkDocument
    decohered: list[str] = Field(default_factory=list)
    purification: list[str] = Field(default_factory=list)
    nonnegative: bool = False


class ChainTablesDocument(BaseModel):
    """Log-space HMM tables (transition N×N, emission N×d_obs, initial N)."""

    transition: list[list[float]]
    emission: list[list[float]]
    initial: list[float]


class MixtureDocument(BaseModel):
    """Schema for best-epoch HMM mixture parameters."""

    format: Literal["tnprob-hmm-mixture"] = "tnprob-hmm-mixture"
    version: int = 1
    family: MixtureTag
    hidden_dim: int = Field(ge=1)
    d_obs: int = Field(ge=1)
    t_len: int = Field(ge=1)
    first: ChainTablesDocument
    second: ChainTablesDocument
    logit: float
    epoch: Optional[int] = None
    test_nll: Optional[float] = None


# =============================================================================
# Runs
# =============================================================================


class RunManifest(BaseModel):
    """Every command run writes one manifest next to its artifacts."""

    command: str
    config: dict[str, Any]
    seeds: dict[str, Any] = Field(default_factory=dict)
    artifacts: list[str] = Field(default_factory=list)
    tool_version: str
    started_at: datetime
    wall_seconds: float


class CheckResult(BaseModel):
    """Result of a single verification check."""

    name: str
    kind: Literal["bound", "witness"] = "bound"
    residual: float
    tolerance: float
    passed: bool
    witness: Optional[dict[str, Any]] = None


class SuiteReport(BaseModel):
    """Schema for one verification suite run."""

    suite: str
    description: str = ""
    trials: int
    tolerance: float
    max_residual: float = 0.0
    passed: bool
    checks: list[CheckResult] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    seconds: float = 0.0


class VerifyReport(BaseModel):
    """Schema for the combined report written by `tnprob verify`."""

    seed: int
    trials: int
    tolerance: Optional[float] = None
    passed: bool
    suites: list[SuiteReport]
