"""
Conversions between model families, hidden-edge readout and conditional independence.

All conversions are constructive: they rewrite cores and graphs, never tables.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tnprob.config import settings
from tnprob.errors import PreconditionError, ShapeMismatchError
from tnprob.inference import distribution, marginalize
from tnprob.models import BornMachine, DecoheredBM, Distribution, Lps, Ugm
from tnprob.network import (
    cap_visible_edges,
    components_after_removal,
    is_cut_set,
    network_from_cores,
    promote_hidden_edge,
)
from tnprob.tensor import copy_tensor

logger = logging.getLogger(__name__)

FULLY_DECOHERED_REQUIRED = "fully-decohered model required: every hidden edge must be decohered"


@dataclass(frozen=True)
class PhaseAssignment:
    """Per-node real phase tables in turns; a node without a table gets phase 0."""

    tables: Mapping[str, NDArray[np.float64]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        tables = {node: np.asarray(t, dtype=np.float64) for node, t in self.tables.items()}
        for node, table in tables.items():
            if not np.all(np.isfinite(table)):
                raise ValueError(f"phase table for {node!r} has non-finite entries")
        object.__setattr__(self, "tables", tables)

    @classmethod
    def random(cls, m: Ugm, rng: np.random.Generator) -> PhaseAssignment:
        """Uniform phases in [0, 1) turns for every core."""
        return cls({node: rng.uniform(size=core.shape) for node, core in m.net.cores.items()})

    def phase_factor(self, node: str, shape: tuple[int, ...]) -> NDArray[np.complex128]:
        table = self.tables.get(node)
        if table is None:
            return np.ones(shape, dtype=np.complex128)
        if table.shape != shape:
            raise ShapeMismatchError(f"phase table for {node!r} has shape {table.shape}, need {shape}")
        return np.exp(2j * np.pi * table)


@dataclass(frozen=True)
class EdgeToNodeAssignment:
    """Maps each decohered edge to one of its endpoints."""

    mapping: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def default(cls, m: DecoheredBM) -> EdgeToNodeAssignment:
        """Each decohered edge goes to its endpoint with the smaller node ID."""
        g = m.net.graph
        return cls({e: min(g.edges[e].endpoints) for e in sorted(m.decohered)})

    def resolve(self, m: DecoheredBM) -> dict[str, str]:
        g = m.net.graph
        stray = set(self.mapping) - m.decohered
        if stray:
            raise PreconditionError(f"assignment names edges that are not decohered: {sorted(stray)}")
        resolved = {**EdgeToNodeAssignment.default(m).mapping, **self.mapping}
        for edge_id, node in resolved.items():
            if node not in g.edges[edge_id].endpoints:
                raise PreconditionError(f"edge {edge_id!r} is not incident to node {node!r}")
        return resolved


@dataclass(frozen=True, eq=False)
class ForcedReadout:
    """Outcome of reading out a coherent hidden edge of a Born machine."""

    model: DecoheredBM
    readout_variable: str
    before: Distribution
    after: Distribution
    total_variation: float
    changed: bool


@dataclass(frozen=True, eq=False)
class CondIndependenceReport:
    """Per-outcome residuals max |P(a,b|z) - P(a|z)P(b|z)| across a decohered edge set."""

    edges: tuple[str, ...]
    is_cut_set: bool
    partition: tuple[tuple[str, ...], tuple[str, ...]]
    residuals: dict[tuple[int, ...], float]
    skipped: int
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def holds(self) -> bool:
        return self.max_residual <= self.tolerance


# =============================================================================
# UGM <-> fully decohered BM
# =============================================================================


def fdbm_to_ugm(m: DecoheredBM) -> Ugm:
    """Square the moduli of every core: B = |A|²."""
    if not m.fully_decohered:
        raise PreconditionError(FULLY_DECOHERED_REQUIRED)
    return Ugm(m.net.map_cores(lambda _, a: np.abs(a) ** 2))


def ugm_to_fdbm(m: Ugm, phases: PhaseAssignment | None = None) -> DecoheredBM:
    """A = exp(2πiθ)·√φ on the same graph, every hidden edge decohered."""
    phases = phases or PhaseAssignment()

    def core(node: str, phi: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return phases.phase_factor(node, phi.shape) * np.sqrt(np.clip(phi.real, 0.0, None))

    net = m.net.map_cores(core)
    return DecoheredBM(BornMachine(net), frozenset(net.graph.hidden_edges))


# =============================================================================
# Readout
# =============================================================================


def readout_variable(edge_id: str) -> str:
    return f"Z@{edge_id}"


def readout_edge(m: DecoheredBM, edge_id: str) -> DecoheredBM:
    """
    Replace the decoherence tensor on an edge by a copy tensor exposing `Z@<edge>`.

    Marginalizing the new variable gives back the original distribution.
    """
    if edge_id not in m.decohered:
        raise PreconditionError(f"edge {edge_id!r} is not decohered; read it out with force_readout_bm")
    promoted = promote_hidden_edge(m.net, edge_id, readout_variable(edge_id))
    return DecoheredBM(BornMachine(promoted), m.decohered - {edge_id})


def force_readout_bm(m: BornMachine | DecoheredBM, edge_id: str, tol: float = 1e-12) -> ForcedReadout:
    """Read out a coherent hidden edge and compare the marginal against the original."""
    dbm = m if isinstance(m, DecoheredBM) else DecoheredBM(m)
    if dbm.net.graph.edge(edge_id).is_visible:
        raise PreconditionError(f"edge {edge_id!r} is visible")
    if edge_id in dbm.decohered:
        raise PreconditionError(f"edge {edge_id!r} is already decohered; use readout_edge")
    variable = readout_variable(edge_id)
    model = readout_edge(DecoheredBM(dbm.bm, dbm.decohered | {edge_id}), edge_id)
    before = distribution(dbm)
    after = marginalize(model, [variable])
    tv = before.total_variation(after)
    return ForcedReadout(model, variable, before, after, tv, tv > tol)


# =============================================================================
# Conditional independence
# =============================================================================


def _partition(m: DecoheredBM, edges: list[str], cut: bool) -> tuple[tuple[str, ...], tuple[str, ...]]:
    g = m.net.graph
    if cut:
        components = components_after_removal(g, edges)
        first = components[0]
    else:
        first = {min(g.nodes)}
    left = tuple(v for v in g.visible_order if g.edges[v].endpoints[0] in first)
    right = tuple(v for v in g.visible_order if v not in left)
    return left, right


def _split_residual(table: Distribution, left: tuple[str, ...], right: tuple[str, ...]) -> float:
    if not left or not right:
        return 0.0
    axes = [table.axis(v) for v in left + right]
    rows = int(np.prod([table.dims[table.axis(v)] for v in left]))
    joint = np.transpose(table.table, axes).reshape(rows, -1)
    independent = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return float(np.abs(joint - independent).max())


def check_cond_independence(
    m: DecoheredBM, edges: Iterable[str], tol: float = 1e-10
) -> CondIndependenceReport:
    """
    Read out the given decohered edges and test A ⟂ B | Z for every supported outcome z.

    A holds the variables of the component containing the smallest node after removing the
    edges, B the rest. When the edges are not a cut set A is the smallest node's variables
    and the check usually fails.
    """
    edges = sorted(set(edges))
    stray = set(edges) - m.decohered
    if stray:
        raise PreconditionError(f"conditioning edges must be decohered: {sorted(stray)}")
    cut = is_cut_set(m.net.graph, edges)
    if not cut:
        logger.warning(f"⚠️ edges {edges} are not a cut set; independence is not expected")
    left, right = _partition(m, edges, cut)

    model = m
    for edge_id in edges:
        model = readout_edge(model, edge_id)
    joint = distribution(model)
    latent = [readout_variable(e) for e in edges]
    z_marginal = joint.marginalize([v for v in joint.names if v not in latent])

    residuals: dict[tuple[int, ...], float] = {}
    skipped = 0
    for z in itertools.product(*(range(joint.dims[joint.axis(v)]) for v in latent)):
        if z_marginal.probability(z) <= settings.zero_support:
            skipped += 1
            continue
        conditional = joint.condition(dict(zip(latent, z)))
        residuals[z] = _split_residual(conditional, left, right)
    return CondIndependenceReport(tuple(edges), cut, (left, right), residuals, skipped, tol)


def latent_cut_residual(m: BornMachine | DecoheredBM, edges: Iterable[str]) -> float:
    """
    Distance of a model from the latent-variable explanation across coherent hidden edges.

    Returns max |P(a,b) - Σ_z P(z) P(a|z) P(b|z)| with z the readout of the edges. It is
    zero whenever the edges are already decohered and form a cut set.
    """
    dbm = m if isinstance(m, DecoheredBM) else DecoheredBM(m)
    edges = sorted(set(edges))
    cut = is_cut_set(dbm.net.graph, edges)
    left, right = _partition(dbm, edges, cut)
    model = DecoheredBM(dbm.bm, dbm.decohered | set(edges))
    for edge_id in edges:
        model = readout_edge(model, edge_id)
    joint = distribution(model)
    latent = [readout_variable(e) for e in edges]
    z_marginal = joint.marginalize([v for v in joint.names if v not in latent])

    names = left + right
    original = distribution(dbm)
    target = np.transpose(original.table, [original.axis(v) for v in names])
    mixture = np.zeros_like(target)
    for z in itertools.product(*(range(joint.dims[joint.axis(v)]) for v in latent)):
        weight = z_marginal.probability(z)
        if weight <= settings.zero_support:
            continue
        conditional = joint.condition(dict(zip(latent, z)))
        p_left = conditional.marginalize(right).table
        p_right = conditional.marginalize(left).table
        mixture += weight * np.multiply.outer(p_left, p_right)
    return float(np.abs(target - mixture).max(initial=0.0))


# =============================================================================
# LPS <-> DBM
# =============================================================================


def lps_to_dbm(m: Lps) -> DecoheredBM:
    """
    Close every purification edge with a Δ₁ node `purify@<edge>` and decohere it.

    The result has 2n nodes, n visible edges and m+n hidden edges.
    """
    caps = {e: copy_tensor(1, m.net.graph.dim(e)) for e in sorted(m.purification)}
    net = cap_visible_edges(m.net, caps, node_prefix="purify")
    return DecoheredBM(BornMachine(net), frozenset(m.purification))


def _attach_purification(core: NDArray[np.complex128], modes: list[int]) -> NDArray[np.complex128]:
    """Copy each listed mode into a new trailing mode, then merge the trailing modes."""
    result = core
    for mode in modes:
        d = result.shape[mode]
        result = np.tensordot(result, copy_tensor(3, d).data, axes=([mode], [0]))
        result = np.moveaxis(result, result.ndim - 2, mode)
    base = result.shape[: core.ndim]
    return result.reshape(base + (int(np.prod(result.shape[core.ndim :], dtype=np.int64)),))


def dbm_to_lps(m: DecoheredBM, assignment: EdgeToNodeAssignment | None = None) -> Lps:
    """
    Move each decohered edge's decoherence into a purification edge `P@<node>`.

    The purification dimension at v is the product of the dimensions of the edges mapped
    to v (1 when none is). A node without a visible edge, such as a clique node of the
    dual form, gets a dimension-1 visible edge `pad@<node>`; marginalizing the pads gives
    back the original variables. Nodes with two or more visible edges are refused.
    """
    g = m.net.graph
    for node in g.nodes:
        if len(g.visible_at(node)) > 1:
            raise PreconditionError(
                f"node {node!r} carries {len(g.visible_at(node))} visible edges; an LPS node carries at most one"
            )
    resolved = (assignment or EdgeToNodeAssignment()).resolve(m)
    by_node: dict[str, list[str]] = {node: [] for node in g.nodes}
    for edge_id in sorted(resolved):
        by_node[resolved[edge_id]].append(edge_id)

    cores: dict[str, tuple[ArrayLike, list[str]]] = {}
    pads: list[str] = []
    purification: list[str] = []
    for node in g.nodes:
        p = f"P@{node}"
        if p in g.edges:
            raise PreconditionError(f"purification edge name {p!r} already used")
        modes = [g.mode(node, e) for e in by_node[node]]
        core = _attach_purification(m.net.cores[node].data, modes)
        incident = [*g.incidence[node]]
        if not g.visible_at(node):
            pad = f"pad@{node}"
            if pad in g.edges:
                raise PreconditionError(f"padding edge name {pad!r} already used")
            core = np.expand_dims(core, -2)
            incident.append(pad)
            pads.append(pad)
        cores[node] = (core, [*incident, p])
        purification.append(p)
    net = network_from_cores(cores, visible_order=[*g.visible_order, *pads, *purification])
    return Lps(net, frozenset(purification))
