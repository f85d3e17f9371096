"""Tests for concurrent replications, metrics files and aggregation."""

import csv

import pytest

from tnprob.data.bars_and_stripes import build_dataset
from tnprob.learn import TrainConfig, param_count
from tnprob.learn.trainer import EpochRecord, ReplicationResult
from tnprob.models import MixtureFamily
from tnprob.services import training_service
from tnprob.services.storage_service import load_mixture
from tnprob.services.training_service import aggregate, run_replications, train_family


def replication(r: int, train: list[float], test: list[float], ok: bool = True) -> ReplicationResult:
    trajectory = [EpochRecord(e, a, b, float(e)) for e, (a, b) in enumerate(zip(train, test))]
    result = ReplicationResult(MixtureFamily.UGM, 2, r, 0, 0, trajectory=trajectory)
    if ok:
        result.result = object()  # type: ignore[assignment]
    else:
        result.error = "diverged"
    return result


def read_rows(path):
    with path.open(newline="") as f:
        return list(csv.DictReader(f))


class TestAggregate:
    def test_mean_and_population_std(self):
        rows = aggregate([replication(0, [1.0, 0.5], [2.0, 1.0]), replication(1, [3.0, 1.5], [2.0, 3.0])])
        assert len(rows) == 2
        assert rows[0].replications == 2
        assert rows[0].train_nll_mean == pytest.approx(2.0)
        assert rows[0].train_nll_std == pytest.approx(1.0)
        assert rows[0].test_nll_std == 0.0
        assert rows[1].test_nll_mean == pytest.approx(2.0)

    def test_failed_replications_are_excluded(self):
        rows = aggregate([replication(0, [1.0], [1.0]), replication(1, [9.0], [9.0], ok=False)])
        assert rows[0].replications == 1
        assert rows[0].train_nll_mean == 1.0

    def test_nothing_succeeded(self):
        assert aggregate([replication(0, [1.0], [1.0], ok=False)]) == []


class TestRunReplications:
    async def test_exception_is_recorded_as_failure(self, monkeypatch):
        real = training_service.run_replication

        def flaky(family, hidden_dim, dataset, cfg, r, **kwargs):
            if r == 1:
                raise RuntimeError("worker crashed")
            return real(family, hidden_dim, dataset, cfg, r, **kwargs)

        monkeypatch.setattr(training_service, "run_replication", flaky)
        cfg = TrainConfig(epochs=1, replications=3)
        results = await run_replications(MixtureFamily.UGM, 2, build_dataset(2, 2, segment_len=None), cfg)
        assert [r.ok for r in results] == [True, False, True]
        assert results[1].error == "worker crashed"
        assert results[1].split_seed == cfg.split_seed(1)


class TestTrainFamily:
    async def test_writes_every_artifact(self, tmp_path):
        dataset = build_dataset(2, 2, segment_len=None)
        cfg = TrainConfig(epochs=2, replications=2, seed=3)
        summaries = await train_family("dbm", [1, 2], dataset, cfg, tmp_path, wall_clock=False)

        assert [s.hidden_dim for s in summaries] == [1, 2]
        for summary in summaries:
            assert summary.family is MixtureFamily.DBM
            assert summary.parameters == param_count((summary.hidden_dim, 2))
            assert (summary.succeeded, summary.failed) == (2, 0)
            assert len(summary.best_test_nlls) == 2
            assert len(summary.aggregate) == 3
            assert all(path.exists() for path in summary.artifacts)

        rows = read_rows(tmp_path / "dbm_N2_rep1.csv")
        assert [row["epoch"] for row in rows] == ["0", "1", "2"]
        assert {row["wall_seconds"] for row in rows} == {"0.0"}
        assert {row["family"] for row in rows} == {"dbm"}

        aggregate_rows = read_rows(tmp_path / "dbm_N1_aggregate.csv")
        assert aggregate_rows[0]["replications"] == "2"

        best = load_mixture(tmp_path / "dbm_N2_rep0_best.json")
        assert best.hidden_dim == 2
        assert best.t_len == dataset.t_len

    async def test_splits_shared_across_hidden_dimensions(self, tmp_path):
        dataset = build_dataset(2, 2, segment_len=None)
        cfg = TrainConfig(epochs=1, replications=2)
        summaries = await train_family("ugm", [1, 3], dataset, cfg, tmp_path)
        seeds = [[r.split_seed for r in s.results] for s in summaries]
        assert seeds[0] == seeds[1]
