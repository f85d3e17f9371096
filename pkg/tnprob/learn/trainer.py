"""Full-batch adaptive gradient descent on the mixture NLL."""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import torch
from numpy.typing import ArrayLike

from tnprob.config import settings
from tnprob.data.bars_and_stripes import SequenceDataset, split_indices
from tnprob.errors import TrainingDivergedError
from tnprob.learn.hmm import (
    as_observations,
    mixture_log_prob_torch,
    params_from_tables,
    torch_tables,
)
from tnprob.learn.params import HmmMixtureParams, TrainConfig, init_params
from tnprob.models import MixtureFamily

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    """NLLs after `epoch` optimizer steps (epoch 0 is the initial point)."""

    epoch: int
    train_nll: float
    test_nll: float
    wall_seconds: float


@dataclass
class TrainResult:
    """Trajectory plus the parameters at the minimum held-out NLL."""

    trajectory: list[EpochRecord]
    best_epoch: int
    best_params: HmmMixtureParams
    final_params: HmmMixtureParams

    @property
    def best_test_nll(self) -> float:
        return self.trajectory[self.best_epoch].test_nll


@dataclass
class ReplicationResult:
    """Result of one replication; `error` is set when training diverged."""

    family: MixtureFamily
    hidden_dim: int
    replication: int
    split_seed: int
    init_seed: int
    result: TrainResult | None = None
    error: str | None = None
    trajectory: list[EpochRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.result is not None


def train(
    p0: HmmMixtureParams,
    train_set: ArrayLike,
    test_set: ArrayLike,
    cfg: TrainConfig,
    *,
    steps: int | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> TrainResult:
    """
    Run Adam on the training NLL, recording train and test NLL after every step.

    Args:
        p0: initial parameters
        train_set: zero-based symbol sequences used for gradients
        test_set: held-out sequences used for best-epoch selection
        cfg: optimizer settings; `cfg.epochs` steps unless `steps` overrides it
        steps: number of optimizer steps (0 records only the initial point)
        clock: time source for the wall_seconds column

    Returns:
        TrainResult; ties in held-out NLL go to the earliest epoch
    """
    torch.set_num_threads(settings.torch_threads)
    steps = cfg.epochs if steps is None else steps
    train_obs = as_observations(p0, train_set)
    test_obs = as_observations(p0, test_set)
    tables = torch_tables(p0, requires_grad=True)
    optimizer = torch.optim.Adam(tables, lr=cfg.lr, betas=(cfg.beta1, cfg.beta2), eps=cfg.eps)

    trajectory: list[EpochRecord] = []
    best_epoch, best_nll = 0, math.inf
    best_tables = [t.detach().clone() for t in tables]
    start = clock()
    for epoch in range(steps + 1):
        optimizer.zero_grad()
        loss = -mixture_log_prob_torch(p0.family, tables, train_obs).mean()
        with torch.no_grad():
            test_nll = float(-mixture_log_prob_torch(p0.family, tables, test_obs).mean())
        record = EpochRecord(epoch, float(loss.detach()), test_nll, clock() - start)
        if not (math.isfinite(record.train_nll) and math.isfinite(record.test_nll)):
            raise TrainingDivergedError(f"NLL became non-finite at epoch {epoch}", trajectory)
        trajectory.append(record)
        if record.test_nll < best_nll:
            best_epoch, best_nll = epoch, record.test_nll
            best_tables = [t.detach().clone() for t in tables]
        if epoch < steps:
            loss.backward()
            optimizer.step()

    return TrainResult(
        trajectory=trajectory,
        best_epoch=best_epoch,
        best_params=params_from_tables(p0, best_tables),
        final_params=params_from_tables(p0, tables),
    )


def run_replication(
    family: MixtureFamily | str,
    hidden_dim: int,
    dataset: SequenceDataset,
    cfg: TrainConfig,
    replication: int,
    *,
    clock: Callable[[], float] = time.perf_counter,
) -> ReplicationResult:
    """
    Split, initialize and train one replication.

    The split depends only on (seed, replication), so every hidden dimension and family
    sees the same splits. Divergence is recorded on the result rather than raised.
    """
    family = MixtureFamily(family)
    obs = dataset.as_indices()
    split_seed, init_seed = cfg.split_seed(replication), cfg.init_seed(replication)
    train_idx, test_idx = split_indices(obs.shape[0], cfg.split_fraction, split_seed)
    p0 = init_params(family, hidden_dim, dataset.d_obs, dataset.t_len, init_seed)
    outcome = ReplicationResult(family, hidden_dim, replication, split_seed, init_seed)
    try:
        outcome.result = train(p0, obs[train_idx], obs[test_idx], cfg, clock=clock)
        outcome.trajectory = outcome.result.trajectory
    except TrainingDivergedError as e:
        logger.warning(f"⚠️ {family.value} N={hidden_dim} replication {replication} diverged: {e}")
        outcome.error = str(e)
        outcome.trajectory = list(e.trajectory)
    return outcome
