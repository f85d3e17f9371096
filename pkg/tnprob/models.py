"""Probabilistic model families built on tensor networks, and the Distribution table."""

from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tnprob.config import settings
from tnprob.errors import (
    DegenerateModelError,
    ModelInvariantError,
    OutcomeRangeError,
    ShapeMismatchError,
    UndefinedConditionalError,
    UnknownVariableError,
)
from tnprob.network import TensorNetwork, network_from_cores
from tnprob.tensor import DenseTensor, copy_tensor


class ModelFamily(str, enum.Enum):
    """Model family tag, as stored in model files."""

    UGM = "ugm"
    BM = "bm"
    DBM = "dbm"
    LPS = "lps"


class MixtureFamily(str, enum.Enum):
    """The two HMM mixtures compared in the Bars-and-Stripes experiment."""

    UGM = "ugm"
    DBM = "dbm"


# =============================================================================
# Model families
# =============================================================================


@dataclass(frozen=True, eq=False)
class Ugm:
    """
    Undirected graphical model in TN-dual form.

    Clique potentials are the nodes; random variables live on copy-tensor nodes whose
    visible edge is the variable. Every core must be real and non-negative.
    """

    net: TensorNetwork
    family = ModelFamily.UGM

    def __post_init__(self) -> None:
        tol = settings.negative_tolerance
        for node, core in self.net.cores.items():
            data = core.data
            scale = max(1.0, float(np.abs(data).max()))
            if np.any(np.abs(data.imag) > tol * scale) or np.any(data.real < -tol * scale):
                raise ModelInvariantError(f"UGM core {node!r} is not real and non-negative")

    @classmethod
    def from_cliques(
        cls,
        variables: Mapping[str, int] | Sequence[tuple[str, int]],
        cliques: Sequence[tuple[str, Sequence[str], ArrayLike]],
        latent: Iterable[str] = (),
    ) -> Ugm:
        """
        Build the TN-dual network from clique potentials over named variables.

        Args:
            variables: (name, dimension) per random variable, in visible order
            cliques: (potential name, variables of the clique, non-negative table)
            latent: variables summed out (they get no visible edge)

        Returns:
            The UGM; clique nodes are named by potential, variable nodes `rv:<name>`,
            and the hidden edge between them `<potential>~<name>`.
        """
        dims = dict(variables.items() if isinstance(variables, Mapping) else variables)
        latent = set(latent)
        unknown = latent - set(dims)
        if unknown:
            raise UnknownVariableError(f"latent variables not declared: {sorted(unknown)}")

        cores: dict[str, tuple[DenseTensor | ArrayLike, list[str]]] = {}
        attached: dict[str, list[str]] = {name: [] for name in dims}
        for name, scope, table in cliques:
            table = np.asarray(table)
            for var in scope:
                if var not in dims:
                    raise UnknownVariableError(f"clique {name!r} names unknown variable {var!r}")
            expected = tuple(dims[var] for var in scope)
            if table.shape != expected:
                raise ShapeMismatchError(f"potential {name!r} has shape {table.shape}, need {expected}")
            edge_ids = [f"{name}~{var}" for var in scope]
            for var, edge_id in zip(scope, edge_ids):
                attached[var].append(edge_id)
            cores[name] = (table, edge_ids)

        for var, dim in dims.items():
            edge_ids = list(attached[var])
            if var not in latent:
                edge_ids.append(var)
            if not edge_ids:
                raise ModelInvariantError(f"latent variable {var!r} belongs to no clique")
            cores[f"rv:{var}"] = (copy_tensor(len(edge_ids), dim), edge_ids)

        visible = [var for var in dims if var not in latent]
        return cls(network_from_cores(cores, visible_order=visible))


@dataclass(frozen=True, eq=False)
class BornMachine:
    """
    Born machine: P(x) = |ψ_x|² / ‖ψ‖² with ψ the network's evaluation.

    ‖ψ‖ > 0 is checked when a distribution is computed, not on construction.
    """

    net: TensorNetwork
    family = ModelFamily.BM


@dataclass(frozen=True, eq=False)
class DecoheredBM:
    """A Born machine whose hidden edges in `decohered` carry decoherence tensors."""

    bm: BornMachine
    decohered: frozenset[str] = field(default_factory=frozenset)
    family = ModelFamily.DBM

    def __post_init__(self) -> None:
        decohered = frozenset(self.decohered)
        hidden = set(self.bm.net.graph.hidden_edges)
        stray = decohered - hidden
        if stray:
            raise ModelInvariantError(f"decohered edges must be hidden edges: {sorted(stray)}")
        object.__setattr__(self, "decohered", decohered)

    @property
    def net(self) -> TensorNetwork:
        return self.bm.net

    @property
    def fully_decohered(self) -> bool:
        return self.decohered == set(self.bm.net.graph.hidden_edges)


@dataclass(frozen=True, eq=False)
class Lps:
    """Locally purified state: every node has one ordinary and one purification visible edge."""

    net: TensorNetwork
    purification: frozenset[str] = field(default_factory=frozenset)
    family = ModelFamily.LPS

    def __post_init__(self) -> None:
        purification = frozenset(self.purification)
        g = self.net.graph
        visible = set(g.visible_edges)
        if not purification <= visible:
            raise ModelInvariantError(
                f"purification edges must be visible: {sorted(purification - visible)}"
            )
        for node in g.nodes:
            at_node = g.visible_at(node)
            flagged = [e for e in at_node if e in purification]
            if len(at_node) != 2 or len(flagged) != 1:
                raise ModelInvariantError(
                    f"LPS node {node!r} needs exactly two visible edges, one of them purification"
                )
        object.__setattr__(self, "purification", purification)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(e for e in self.net.visible_order if e not in self.purification)


Model = Union[Ugm, BornMachine, DecoheredBM, Lps]


# =============================================================================
# Distribution
# =============================================================================


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Normalized probability table over named variables (zero-based outcomes).

    `log_z` is the log normalizer of the network it came from, `raw_min` the smallest
    normalized entry before clamping, `log_evidence` the accumulated log-probability of
    every conditioning step applied so far.
    """

    variables: tuple[tuple[str, int], ...]
    table: NDArray[np.float64]
    log_z: float = 0.0
    raw_min: float = 0.0
    log_evidence: float = 0.0

    def __post_init__(self) -> None:
        table = np.array(self.table, dtype=np.float64, copy=True)
        dims = tuple(d for _, d in self.variables)
        if table.shape != dims:
            raise ShapeMismatchError(f"table shape {table.shape} does not match variables {dims}")
        table.setflags(write=False)
        object.__setattr__(self, "variables", tuple((str(n), int(d)) for n, d in self.variables))
        object.__setattr__(self, "table", table)

    @classmethod
    def from_unnormalized(
        cls,
        variables: Sequence[tuple[str, int]],
        values: DenseTensor | ArrayLike,
        log_scale: float = 0.0,
        log_evidence: float = 0.0,
    ) -> Distribution:
        """Normalize a non-negative table, clamping round-off negatives to zero."""
        data = values.data if isinstance(values, DenseTensor) else np.asarray(values)
        real = np.real(data).astype(np.float64)
        z = float(real.sum())
        if not math.isfinite(z) or z <= 0.0:
            raise DegenerateModelError(f"unnormalized table sums to {z!r}; model is degenerate")
        table = real / z
        raw_min = float(table.min())
        table = np.clip(table, 0.0, None)
        table = table / table.sum()
        return cls(tuple(variables), table, math.log(z) + log_scale, raw_min, log_evidence)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.variables)

    def as_tensor(self) -> DenseTensor:
        return DenseTensor(self.table)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(f"unknown variable {name!r}; have {list(self.names)}") from None

    def probability(self, outcome: Sequence[int]) -> float:
        return float(self.table[tuple(outcome)])

    def marginalize(self, names: Iterable[str]) -> Distribution:
        """Sum out the named variables."""
        axes = sorted({self.axis(name) for name in names})
        kept = tuple(v for i, v in enumerate(self.variables) if i not in axes)
        table = self.table.sum(axis=tuple(axes)) if axes else self.table
        return Distribution(kept, table, self.log_z, self.raw_min, self.log_evidence)

    def condition(self, assignment: Mapping[str, int]) -> Distribution:
        """Slice at the assigned outcomes and renormalize."""
        index: list[int | slice] = [slice(None)] * len(self.variables)
        for name, outcome in assignment.items():
            axis = self.axis(name)
            check_outcome(name, outcome, self.variables[axis][1])
            index[axis] = outcome
        sliced = self.table[tuple(index)]
        mass = float(sliced.sum())
        if mass <= settings.zero_support:
            raise UndefinedConditionalError(f"conditioning event {dict(assignment)} has probability {mass:.3g}")
        kept = tuple(v for v in self.variables if v[0] not in assignment)
        return Distribution(kept, sliced / mass, self.log_z, self.raw_min, self.log_evidence + math.log(mass))

    def total_variation(self, other: Distribution) -> float:
        if self.variables != other.variables:
            raise ShapeMismatchError(f"variables differ: {self.variables} vs {other.variables}")
        return 0.5 * float(np.abs(self.table - other.table).sum())

    def max_abs_diff(self, other: Distribution) -> float:
        if self.variables != other.variables:
            raise ShapeMismatchError(f"variables differ: {self.variables} vs {other.variables}")
        return float(np.abs(self.table - other.table).max(initial=0.0))

    def rows(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """(outcome tuple, probability) in row-major order."""
        for outcome in itertools.product(*(range(d) for d in self.dims)):
            yield outcome, float(self.table[outcome])


def check_outcome(name: str, outcome: int, dim: int) -> None:
    if not 0 <= outcome < dim:
        raise OutcomeRangeError(f"outcome {outcome} of {name!r} outside 0..{dim - 1}")
