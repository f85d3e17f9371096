"""HMM mixture models and their maximum-likelihood training."""

from tnprob.learn.hmm import (
    build_hmm_bm,
    build_hmm_ugm,
    mixture_log_prob,
    mixture_prob,
    nll,
    nll_and_grad,
    nll_grad,
)
from tnprob.learn.params import (
    ChainTables,
    HmmMixtureParams,
    TrainConfig,
    init_params,
    param_count,
)
from tnprob.learn.trainer import EpochRecord, ReplicationResult, TrainResult, run_replication, train

__all__ = [
    "ChainTables",
    "EpochRecord",
    "HmmMixtureParams",
    "ReplicationResult",
    "TrainConfig",
    "TrainResult",
    "build_hmm_bm",
    "build_hmm_ugm",
    "init_params",
    "mixture_log_prob",
    "mixture_prob",
    "nll",
    "nll_and_grad",
    "nll_grad",
    "param_count",
    "run_replication",
    "train",
]
