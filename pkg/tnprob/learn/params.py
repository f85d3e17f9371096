"""HMM mixture parameters, their initialization and training configuration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, Field

from tnprob.errors import ShapeMismatchError
from tnprob.models import MixtureFamily
from tnprob.schemas import ChainTablesDocument, MixtureDocument


@dataclass(frozen=True, eq=False)
class ChainTables:
    """
    One set of HMM tables: transition (N×N), emission (N×d_obs) and initial (N).

    Holds log-potentials for magnitude sets and phases in turns for phase sets.
    """

    transition: NDArray[np.float64]
    emission: NDArray[np.float64]
    initial: NDArray[np.float64]

    def __post_init__(self) -> None:
        transition = np.array(self.transition, dtype=np.float64)
        emission = np.array(self.emission, dtype=np.float64)
        initial = np.array(self.initial, dtype=np.float64)
        n = initial.shape[0] if initial.ndim == 1 else -1
        if transition.shape != (n, n) or emission.ndim != 2 or emission.shape[0] != n:
            raise ShapeMismatchError(
                f"inconsistent HMM tables: transition {transition.shape}, "
                f"emission {emission.shape}, initial {initial.shape}"
            )
        for array in (transition, emission, initial):
            array.setflags(write=False)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "emission", emission)
        object.__setattr__(self, "initial", initial)

    @property
    def hidden_dim(self) -> int:
        return int(self.initial.shape[0])

    @property
    def d_obs(self) -> int:
        return int(self.emission.shape[1])

    @property
    def size(self) -> int:
        return self.transition.size + self.emission.size + self.initial.size

    def arrays(self) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        return self.transition, self.emission, self.initial

    def to_document(self) -> ChainTablesDocument:
        return ChainTablesDocument(
            transition=self.transition.tolist(),
            emission=self.emission.tolist(),
            initial=self.initial.tolist(),
        )

    @classmethod
    def from_document(cls, doc: ChainTablesDocument) -> ChainTables:
        return cls(np.asarray(doc.transition), np.asarray(doc.emission), np.asarray(doc.initial))


@dataclass(frozen=True, eq=False)
class HmmMixtureParams:
    """
    Unconstrained parameters of a two-component HMM mixture.

    UGM mixture: `first` and `second` are the log-potential sets of two independent HMMs.
    DBM mixture: `first` is the shared log-magnitude set, `second` the phase set (turns)
    of the Born-machine component. The mixture weight is sigmoid(`logit`).
    """

    family: MixtureFamily
    first: ChainTables
    second: ChainTables
    logit: float
    t_len: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", MixtureFamily(self.family))
        object.__setattr__(self, "logit", float(self.logit))
        if (self.first.hidden_dim, self.first.d_obs) != (self.second.hidden_dim, self.second.d_obs):
            raise ShapeMismatchError("both table sets must share hidden dimension and alphabet")
        if self.t_len < 1:
            raise ShapeMismatchError(f"sequence length must be positive, got {self.t_len}")

    @property
    def hidden_dim(self) -> int:
        return self.first.hidden_dim

    @property
    def d_obs(self) -> int:
        return self.first.d_obs

    @property
    def mixture_weight(self) -> float:
        return float(1.0 / (1.0 + np.exp(-self.logit)))

    def to_vector(self) -> NDArray[np.float64]:
        """Flatten in the order first tables, second tables, logit."""
        parts = [a.reshape(-1) for a in (*self.first.arrays(), *self.second.arrays())]
        return np.concatenate([*parts, [self.logit]])

    def from_vector(self, vector: ArrayLike) -> HmmMixtureParams:
        """Parameters of the same shape filled from a flat vector."""
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (param_count(self),):
            raise ShapeMismatchError(f"expected {param_count(self)} values, got {vector.shape}")
        arrays = []
        offset = 0
        for template in (*self.first.arrays(), *self.second.arrays()):
            arrays.append(vector[offset : offset + template.size].reshape(template.shape))
            offset += template.size
        return HmmMixtureParams(
            self.family, ChainTables(*arrays[:3]), ChainTables(*arrays[3:]), vector[-1], self.t_len
        )

    def to_document(self, epoch: int | None = None, test_nll: float | None = None) -> MixtureDocument:
        return MixtureDocument(
            family=self.family.value,
            hidden_dim=self.hidden_dim,
            d_obs=self.d_obs,
            t_len=self.t_len,
            first=self.first.to_document(),
            second=self.second.to_document(),
            logit=self.logit,
            epoch=epoch,
            test_nll=test_nll,
        )

    @classmethod
    def from_document(cls, doc: MixtureDocument) -> HmmMixtureParams:
        return cls(
            MixtureFamily(doc.family),
            ChainTables.from_document(doc.first),
            ChainTables.from_document(doc.second),
            doc.logit,
            doc.t_len,
        )


class TrainConfig(BaseModel):
    """Full-batch training configuration."""

    epochs: int = Field(default=30, ge=1)
    lr: float = Field(default=0.01, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    replications: int = Field(default=15, ge=1)
    split_fraction: float = Field(default=0.7, gt=0, lt=1)
    seed: int = Field(default=0, ge=0)

    def split_seed(self, replication: int) -> int:
        """Seed of the replication's train/test split; independent of the hidden dimension."""
        return int(np.random.SeedSequence([self.seed, replication, 0]).generate_state(1)[0])

    def init_seed(self, replication: int) -> int:
        return int(np.random.SeedSequence([self.seed, replication, 1]).generate_state(1)[0])


def table_count(hidden_dim: int, d_obs: int) -> int:
    """|Φ| = N² + N·d_obs + N."""
    return hidden_dim * hidden_dim + hidden_dim * d_obs + hidden_dim


def param_count(p: HmmMixtureParams | tuple[int, int]) -> int:
    """Free parameters 2|Φ| + 1, identical for both families."""
    hidden_dim, d_obs = (p.hidden_dim, p.d_obs) if isinstance(p, HmmMixtureParams) else p
    return 2 * table_count(hidden_dim, d_obs) + 1


def init_params(
    family: MixtureFamily | str, hidden_dim: int, d_obs: int, t_len: int, seed: int
) -> HmmMixtureParams:
    """
    Standard-normal log tables and logit; DBM phases uniform in [0, 1) turns.

    Args:
        family: "ugm" or "dbm"
        hidden_dim: N
        d_obs: observation alphabet size
        t_len: sequence length
        seed: generator seed

    Returns:
        Freshly drawn parameters
    """
    family = MixtureFamily(family)
    rng = np.random.default_rng(seed)

    def normal_tables() -> ChainTables:
        return ChainTables(
            rng.standard_normal((hidden_dim, hidden_dim)),
            rng.standard_normal((hidden_dim, d_obs)),
            rng.standard_normal(hidden_dim),
        )

    first = normal_tables()
    if family is MixtureFamily.UGM:
        second = normal_tables()
    else:
        second = ChainTables(
            rng.uniform(size=(hidden_dim, hidden_dim)),
            rng.uniform(size=(hidden_dim, d_obs)),
            rng.uniform(size=hidden_dim),
        )
    return HmmMixtureParams(family, first, second, float(rng.standard_normal()), t_len)
