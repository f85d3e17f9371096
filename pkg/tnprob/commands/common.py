"""Helpers shared by the command-line commands."""

import argparse
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from tnprob import __version__
from tnprob.config import settings
from tnprob.errors import OutcomeRangeError, PreconditionError
from tnprob.schemas import RunManifest
from tnprob.services.storage_service import write_manifest


def manifest_path(artifact: str | Path) -> Path:
    """`<artifact>.manifest.json` next to a file, `manifest.json` inside a directory."""
    artifact = Path(artifact)
    if artifact.is_dir() or not artifact.suffix:
        return artifact / "manifest.json"
    return artifact.with_name(artifact.name + ".manifest.json")


def command_config(args: argparse.Namespace) -> dict[str, Any]:
    """Every flag value (defaults included) plus the effective settings."""
    flags = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "handler"}
    return {"flags": flags, "settings": settings.model_dump()}


class RunRecorder:
    """Collects artifacts of one command run and writes its manifest."""

    def __init__(self, command: str, args: argparse.Namespace, seeds: dict[str, Any] | None = None) -> None:
        self.command = command
        self.config = command_config(args)
        self.seeds = seeds or {}
        self.artifacts: list[str] = []
        self.started_at = datetime.now(timezone.utc)
        self._start = time.perf_counter()

    def add(self, *paths: str | Path) -> None:
        self.artifacts.extend(str(p) for p in paths)

    def write(self, path: str | Path) -> Path:
        manifest = RunManifest(
            command=self.command,
            config=self.config,
            seeds=self.seeds,
            artifacts=self.artifacts,
            tool_version=__version__,
            started_at=self.started_at,
            wall_seconds=time.perf_counter() - self._start,
        )
        return write_manifest(manifest, path)


def comma_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def int_list(value: str) -> list[int]:
    """argparse type for `4,8,16`."""
    try:
        values = [int(item) for item in comma_list(value)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from e
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {value!r}")
    return values


def parse_pairs(value: str | None, what: str) -> dict[str, str]:
    """`a=1,b=2` into {"a": "1", "b": "2"}."""
    pairs: dict[str, str] = {}
    for item in comma_list(value or ""):
        key, sep, val = item.partition("=")
        if not sep or not key.strip() or not val.strip():
            raise PreconditionError(f"malformed {what} {item!r}; expected name=value")
        pairs[key.strip()] = val.strip()
    return pairs


def one_based_outcomes(pairs: dict[str, str]) -> dict[str, int]:
    """Convert one-based CLI outcomes to zero-based library outcomes."""
    outcomes = {}
    for name, raw in pairs.items():
        try:
            value = int(raw)
        except ValueError:
            raise OutcomeRangeError(f"outcome for {name!r} must be an integer, got {raw!r}") from None
        if value < 1:
            raise OutcomeRangeError(f"outcome for {name!r} is one-based; got {value}")
        outcomes[name] = value - 1
    return outcomes
