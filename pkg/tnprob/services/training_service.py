"""Training service: concurrent replications, metrics CSVs and aggregate statistics."""

import asyncio
import csv
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tnprob.data.bars_and_stripes import SequenceDataset
from tnprob.learn.params import TrainConfig, param_count
from tnprob.learn.trainer import EpochRecord, ReplicationResult, run_replication
from tnprob.models import MixtureFamily
from tnprob.services.storage_service import save_mixture
from tnprob.utils import log_to_console

TRAJECTORY_COLUMNS = ["family", "N", "replication", "epoch", "train_nll", "test_nll", "wall_seconds"]
AGGREGATE_COLUMNS = [
    "family",
    "N",
    "epoch",
    "replications",
    "train_nll_mean",
    "train_nll_std",
    "test_nll_mean",
    "test_nll_std",
]


@dataclass
class AggregateRow:
    """Mean and population standard deviation across replications at one epoch."""

    epoch: int
    replications: int
    train_nll_mean: float
    train_nll_std: float
    test_nll_mean: float
    test_nll_std: float


@dataclass
class TrainingSummary:
    """Everything one `train` invocation produced for a single hidden dimension."""

    family: MixtureFamily
    hidden_dim: int
    parameters: int
    results: list[ReplicationResult] = field(default_factory=list)
    aggregate: list[AggregateRow] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)

    @property
    def succeeded(self) -> int:
        return sum(1 for r in self.results if r.ok)

    @property
    def failed(self) -> int:
        return len(self.results) - self.succeeded

    @property
    def best_test_nlls(self) -> list[float]:
        return [r.result.best_test_nll for r in self.results if r.result is not None]


async def run_replications(
    family: MixtureFamily,
    hidden_dim: int,
    dataset: SequenceDataset,
    cfg: TrainConfig,
    clock: Callable[[], float] = time.perf_counter,
) -> list[ReplicationResult]:
    """
    Train every replication concurrently, each in its own worker thread.

    A replication that raises is recorded as failed; the rest still complete.
    """
    tasks = [
        asyncio.to_thread(run_replication, family, hidden_dim, dataset, cfg, r, clock=clock)
        for r in range(cfg.replications)
    ]
    log_to_console(f"🚀 Launching {len(tasks)} {family.value} replication(s) with N={hidden_dim}...")
    outcomes = await asyncio.gather(*tasks, return_exceptions=True)

    results: list[ReplicationResult] = []
    for r, outcome in enumerate(outcomes):
        if isinstance(outcome, Exception):
            log_to_console(f"❌ Replication {r} raised exception: {outcome}")
            results.append(
                ReplicationResult(
                    family, hidden_dim, r, cfg.split_seed(r), cfg.init_seed(r), error=str(outcome)
                )
            )
        else:
            results.append(outcome)
    return results


def aggregate(results: Sequence[ReplicationResult]) -> list[AggregateRow]:
    """Per-epoch statistics over successful replications."""
    trajectories = [r.trajectory for r in results if r.ok]
    if not trajectories:
        return []
    epochs = min(len(t) for t in trajectories)
    rows = []
    for epoch in range(epochs):
        train_nll = np.array([t[epoch].train_nll for t in trajectories])
        test_nll = np.array([t[epoch].test_nll for t in trajectories])
        rows.append(
            AggregateRow(
                epoch=epoch,
                replications=len(trajectories),
                train_nll_mean=float(train_nll.mean()),
                train_nll_std=float(train_nll.std()),
                test_nll_mean=float(test_nll.mean()),
                test_nll_std=float(test_nll.std()),
            )
        )
    return rows


def write_trajectory_csv(
    result: ReplicationResult, trajectory: Sequence[EpochRecord], path: Path, wall_clock: bool = True
) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for record in trajectory:
            writer.writerow(
                [
                    result.family.value,
                    result.hidden_dim,
                    result.replication,
                    record.epoch,
                    repr(record.train_nll),
                    repr(record.test_nll),
                    repr(record.wall_seconds if wall_clock else 0.0),
                ]
            )
    return path


def write_aggregate_csv(
    family: MixtureFamily, hidden_dim: int, rows: Sequence[AggregateRow], path: Path
) -> Path:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    family.value,
                    hidden_dim,
                    row.epoch,
                    row.replications,
                    repr(row.train_nll_mean),
                    repr(row.train_nll_std),
                    repr(row.test_nll_mean),
                    repr(row.test_nll_std),
                ]
            )
    return path


async def train_family(
    family: MixtureFamily | str,
    hidden_dims: Sequence[int],
    dataset: SequenceDataset,
    cfg: TrainConfig,
    out_dir: str | Path,
    wall_clock: bool = True,
) -> list[TrainingSummary]:
    """
    Train every hidden dimension in turn and write all artifacts to `out_dir`.

    Files per dimension: `<family>_N<N>_rep<r>.csv` per replication,
    `<family>_N<N>_aggregate.csv`, and `<family>_N<N>_rep<r>_best.json` for each
    replication that finished.
    """
    family = MixtureFamily(family)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = []
    for hidden_dim in hidden_dims:
        results = await run_replications(family, hidden_dim, dataset, cfg)
        summary = TrainingSummary(family, hidden_dim, param_count((hidden_dim, dataset.d_obs)), results)
        stem = f"{family.value}_N{hidden_dim}"
        for result in results:
            path = out_dir / f"{stem}_rep{result.replication}.csv"
            summary.artifacts.append(write_trajectory_csv(result, result.trajectory, path, wall_clock))
            if result.result is not None:
                best = out_dir / f"{stem}_rep{result.replication}_best.json"
                summary.artifacts.append(
                    save_mixture(
                        result.result.best_params, best, result.result.best_epoch, result.result.best_test_nll
                    )
                )
        summary.aggregate = aggregate(results)
        summary.artifacts.append(
            write_aggregate_csv(family, hidden_dim, summary.aggregate, out_dir / f"{stem}_aggregate.csv")
        )
        summaries.append(summary)
    return summaries
