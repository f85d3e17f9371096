"""Tensor-network graphs, cores, evaluation and gauge transformations."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from numpy.typing import ArrayLike, NDArray

from tnprob.config import settings
from tnprob.errors import (
    DimensionMismatchError,
    InvalidNetworkError,
    SchemaError,
    ShapeMismatchError,
    SingularGaugeError,
    UnknownEdgeError,
    VisibleEdgeError,
)
from tnprob.schemas import EdgeDocument, NetworkDocument, NodeDocument
from tnprob.tensor import DenseTensor, as_tensor, contract_network, copy_tensor


@dataclass(frozen=True)
class Edge:
    """An edge with one endpoint (visible) or two endpoints (hidden)."""

    id: str
    endpoints: tuple[str, ...]
    dim: int

    @property
    def is_visible(self) -> bool:
        return len(self.endpoints) == 1


@dataclass(frozen=True, eq=False)
class TnGraph:
    """
    Graph of a tensor network.

    `incidence[node]` is the node's ordered incident edges; position k is mode k of the
    node's core. `visible_order` fixes the mode order of the evaluated tensor.
    """

    nodes: tuple[str, ...]
    edges: Mapping[str, Edge]
    incidence: Mapping[str, tuple[str, ...]]
    visible_order: tuple[str, ...]

    @property
    def visible_edges(self) -> tuple[str, ...]:
        return tuple(e for e, edge in self.edges.items() if edge.is_visible)

    @property
    def hidden_edges(self) -> tuple[str, ...]:
        return tuple(e for e, edge in self.edges.items() if not edge.is_visible)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise UnknownEdgeError(f"unknown edge {edge_id!r}") from None

    def dim(self, edge_id: str) -> int:
        return self.edge(edge_id).dim

    def mode(self, node: str, edge_id: str) -> int:
        """Mode index of `edge_id` in the core of `node`."""
        return self.incidence[node].index(edge_id)

    def visible_at(self, node: str) -> tuple[str, ...]:
        return tuple(e for e in self.incidence[node] if self.edges[e].is_visible)

    def to_networkx(self, without: Iterable[str] = ()) -> nx.MultiGraph:
        """Node graph over hidden edges, skipping the given edge IDs."""
        removed = set(without)
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.nodes)
        for edge in self.edges.values():
            if not edge.is_visible and edge.id not in removed:
                graph.add_edge(*edge.endpoints, key=edge.id)
        return graph


@dataclass(frozen=True, eq=False)
class TensorNetwork:
    """A graph plus one core per node whose shape follows the node's incident edges."""

    graph: TnGraph
    cores: Mapping[str, DenseTensor]

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.graph.nodes

    @property
    def visible_order(self) -> tuple[str, ...]:
        return self.graph.visible_order

    def core(self, node: str) -> DenseTensor:
        return self.cores[node]

    def with_cores(self, updates: Mapping[str, DenseTensor | ArrayLike]) -> TensorNetwork:
        cores = dict(self.cores)
        cores.update({node: as_tensor(core) for node, core in updates.items()})
        return TensorNetwork(self.graph, cores)

    def map_cores(self, fn) -> TensorNetwork:  # type: ignore[no-untyped-def]
        """Apply fn(node, core array) -> array to every core."""
        return TensorNetwork(
            self.graph, {node: as_tensor(fn(node, core.data)) for node, core in self.cores.items()}
        )


@dataclass(frozen=True)
class GaugeTransform:
    """Insert M and M⁻¹ on a hidden edge."""

    edge: str
    matrix: NDArray[np.complex128] = field(compare=False)

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ShapeMismatchError(f"gauge matrix must be square, got shape {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class NonnegGaugeFactors:
    """M = P D with P a permutation and D a positive diagonal."""

    permutation: NDArray[np.float64] = field(compare=False)
    diagonal: NDArray[np.float64] = field(compare=False)


# =============================================================================
# Validation
# =============================================================================


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "network is valid"
        return "; ".join(f"[{v.kind}] {v.subject}: {v.message}" for v in self.violations)


def validate(net: TensorNetwork) -> ValidationReport:
    """Check every structural invariant; never raises."""
    g = net.graph
    violations: list[Violation] = []
    node_set = set(g.nodes)

    if len(node_set) != len(g.nodes):
        violations.append(Violation("duplicate-node", ",".join(g.nodes), "node IDs repeat"))

    for edge_id, edge in g.edges.items():
        if edge.id != edge_id:
            violations.append(Violation("edge-id", edge_id, f"record carries id {edge.id!r}"))
        if len(edge.endpoints) not in (1, 2):
            violations.append(
                Violation("endpoint-count", edge_id, f"{len(edge.endpoints)} endpoints (need 1 or 2)")
            )
        if len(set(edge.endpoints)) != len(edge.endpoints):
            violations.append(Violation("self-loop", edge_id, "both endpoints are the same node"))
        if edge.dim < 1:
            violations.append(Violation("dimension", edge_id, f"dimension {edge.dim} < 1"))
        for node in edge.endpoints:
            if node not in node_set:
                violations.append(Violation("unknown-node", edge_id, f"endpoint {node!r} is not a node"))
            elif edge_id not in g.incidence.get(node, ()):
                violations.append(
                    Violation("incidence", edge_id, f"missing from incident edges of {node!r}")
                )

    for node in g.nodes:
        incident = g.incidence.get(node)
        if not incident:
            violations.append(Violation("isolated-node", node, "node has no incident edge"))
            continue
        if len(set(incident)) != len(incident):
            violations.append(Violation("incidence", node, "an incident edge is listed twice"))
        for edge_id in incident:
            edge = g.edges.get(edge_id)
            if edge is None:
                violations.append(Violation("unknown-edge", node, f"incident edge {edge_id!r} undefined"))
            elif node not in edge.endpoints:
                violations.append(
                    Violation("incidence", node, f"edge {edge_id!r} does not list it as endpoint")
                )

    visible = {e for e, edge in g.edges.items() if edge.is_visible}
    if len(set(g.visible_order)) != len(g.visible_order) or set(g.visible_order) != visible:
        violations.append(
            Violation("visible-order", "visible_order", "must list each visible edge exactly once")
        )

    for node in g.nodes:
        core = net.cores.get(node)
        if core is None:
            violations.append(Violation("missing-core", node, "no core assigned"))
            continue
        incident = g.incidence.get(node, ())
        expected = tuple(g.edges[e].dim if e in g.edges else -1 for e in incident)
        if core.shape != expected:
            violations.append(
                Violation("shape-mismatch", node, f"core shape {core.shape} != edge dims {expected}")
            )
    for node in net.cores:
        if node not in node_set:
            violations.append(Violation("unknown-node", node, "core assigned to a non-node"))

    return ValidationReport(tuple(violations))


def ensure_valid(net: TensorNetwork) -> TensorNetwork:
    report = validate(net)
    if not report.ok:
        raise InvalidNetworkError(report)
    return net


# =============================================================================
# Construction
# =============================================================================


def network_from_cores(
    cores: Mapping[str, tuple[DenseTensor | ArrayLike, Sequence[str]]],
    visible_order: Sequence[str] | None = None,
) -> TensorNetwork:
    """
    Build a network from {node: (core, incident edge IDs)}.

    Edge endpoints and dimensions are read off the cores; an edge named by one node is
    visible, by two nodes hidden. Visible order defaults to first appearance.
    """
    endpoints: dict[str, list[str]] = {}
    dims: dict[str, int] = {}
    tensors: dict[str, DenseTensor] = {}
    incidence: dict[str, tuple[str, ...]] = {}
    for node, (core, edge_ids) in cores.items():
        tensor = as_tensor(core)
        if tensor.order != len(edge_ids):
            raise InvalidNetworkError(
                ValidationReport(
                    (Violation("shape-mismatch", node, f"order {tensor.order} with {len(edge_ids)} edges"),)
                )
            )
        tensors[node] = tensor
        incidence[node] = tuple(edge_ids)
        for edge_id, dim in zip(edge_ids, tensor.shape):
            endpoints.setdefault(edge_id, []).append(node)
            dims.setdefault(edge_id, dim)

    edges = {e: Edge(e, tuple(ends), dims[e]) for e, ends in endpoints.items()}
    if visible_order is None:
        visible_order = [e for e, edge in edges.items() if edge.is_visible]
    graph = TnGraph(tuple(cores), edges, incidence, tuple(visible_order))
    return ensure_valid(TensorNetwork(graph, tensors))


def _replace_in(incident: tuple[str, ...], old: str, new: str) -> tuple[str, ...]:
    return tuple(new if e == old else e for e in incident)


def _fresh(net: TensorNetwork, node_ids: Iterable[str] = (), edge_ids: Iterable[str] = ()) -> None:
    taken_nodes = [n for n in node_ids if n in net.graph.incidence]
    taken_edges = [e for e in edge_ids if e in net.graph.edges]
    if taken_nodes or taken_edges:
        raise InvalidNetworkError(
            ValidationReport(
                (Violation("name-clash", ",".join(taken_nodes + taken_edges), "ID already in use"),)
            )
        )


def promote_hidden_edge(net: TensorNetwork, edge_id: str, visible_id: str | None = None) -> TensorNetwork:
    """
    Insert a Δ₃ node on a hidden edge, exposing one new visible edge.

    The edge splits into `<edge>#0` (first endpoint side) and `<edge>#1`; the new visible
    edge (default `Z@<edge>`) is appended to the visible order.
    """
    g = net.graph
    edge = g.edge(edge_id)
    if edge.is_visible:
        raise VisibleEdgeError(f"edge {edge_id!r} is visible; only hidden edges can be promoted")
    visible_id = visible_id or f"Z@{edge_id}"
    node_id, left, right = f"copy@{edge_id}", f"{edge_id}#0", f"{edge_id}#1"
    _fresh(net, [node_id], [left, right, visible_id])

    u, w = edge.endpoints
    edges = {e: rec for e, rec in g.edges.items() if e != edge_id}
    edges[left] = Edge(left, (u, node_id), edge.dim)
    edges[right] = Edge(right, (w, node_id), edge.dim)
    edges[visible_id] = Edge(visible_id, (node_id,), edge.dim)
    incidence = dict(g.incidence)
    incidence[u] = _replace_in(incidence[u], edge_id, left)
    incidence[w] = _replace_in(incidence[w], edge_id, right)
    incidence[node_id] = (left, right, visible_id)
    cores = dict(net.cores)
    cores[node_id] = copy_tensor(3, edge.dim)
    graph = TnGraph(g.nodes + (node_id,), edges, incidence, g.visible_order + (visible_id,))
    return TensorNetwork(graph, cores)


def cap_visible_edges(
    net: TensorNetwork, caps: Mapping[str, DenseTensor | ArrayLike], *, node_prefix: str = "cap"
) -> TensorNetwork:
    """
    Contract vectors onto visible edges (Δ₁ marginalizes, e_x conditions).

    Each capped edge becomes hidden, joined to a new node `<node_prefix>@<edge>` holding the vector,
    and leaves the visible order.
    """
    g = net.graph
    edges = dict(g.edges)
    incidence = dict(g.incidence)
    cores = dict(net.cores)
    nodes = list(g.nodes)
    for edge_id, vector in caps.items():
        edge = g.edge(edge_id)
        if not edge.is_visible:
            raise VisibleEdgeError(f"edge {edge_id!r} is hidden; only visible edges can be capped")
        tensor = as_tensor(vector)
        if tensor.shape != (edge.dim,):
            raise DimensionMismatchError(f"cap for {edge_id!r} has shape {tensor.shape}, need ({edge.dim},)")
        node_id = f"{node_prefix}@{edge_id}"
        _fresh(net, [node_id])
        edges[edge_id] = Edge(edge_id, edge.endpoints + (node_id,), edge.dim)
        incidence[node_id] = (edge_id,)
        cores[node_id] = tensor
        nodes.append(node_id)
    order = tuple(e for e in g.visible_order if e not in caps)
    return TensorNetwork(TnGraph(tuple(nodes), edges, incidence, order), cores)


def split_hidden_edge(net: TensorNetwork, edge_id: str, ids: tuple[str, str] | None = None) -> TensorNetwork:
    """Cut a hidden edge into two visible edges, one per endpoint, appended to the visible order."""
    g = net.graph
    edge = g.edge(edge_id)
    if edge.is_visible:
        raise VisibleEdgeError(f"edge {edge_id!r} is already visible")
    left, right = ids or (f"{edge_id}#0", f"{edge_id}#1")
    _fresh(net, edge_ids=[left, right])
    u, w = edge.endpoints
    edges = {e: rec for e, rec in g.edges.items() if e != edge_id}
    edges[left] = Edge(left, (u,), edge.dim)
    edges[right] = Edge(right, (w,), edge.dim)
    incidence = dict(g.incidence)
    incidence[u] = _replace_in(incidence[u], edge_id, left)
    incidence[w] = _replace_in(incidence[w], edge_id, right)
    graph = TnGraph(g.nodes, edges, incidence, g.visible_order + (left, right))
    return TensorNetwork(graph, dict(net.cores))


# =============================================================================
# Evaluation and structure
# =============================================================================


def evaluate_scaled(net: TensorNetwork, *, budget: int | None = None) -> tuple[DenseTensor, float]:
    """Evaluate with per-step rescaling; the true tensor is result * exp(log_scale)."""
    ensure_valid(net)
    g = net.graph
    array, log_scale = contract_network(
        [net.cores[node].data for node in g.nodes],
        [g.incidence[node] for node in g.nodes],
        g.visible_order,
        budget=budget,
        rescale=True,
    )
    return DenseTensor(array), log_scale


def evaluate(net: TensorNetwork, *, budget: int | None = None) -> DenseTensor:
    """Contract every hidden edge; modes of the result follow the visible order."""
    ensure_valid(net)
    g = net.graph
    array, _ = contract_network(
        [net.cores[node].data for node in g.nodes],
        [g.incidence[node] for node in g.nodes],
        g.visible_order,
        budget=budget,
    )
    return DenseTensor(array)


def _check_edges(g: TnGraph, edge_ids: Iterable[str]) -> list[str]:
    edge_ids = list(edge_ids)
    for edge_id in edge_ids:
        g.edge(edge_id)
    return edge_ids


def is_cut_set(g: TnGraph, edge_ids: Iterable[str]) -> bool:
    """True iff removing the edges leaves at least two connected components."""
    removed = _check_edges(g, edge_ids)
    return nx.number_connected_components(g.to_networkx(without=removed)) >= 2


def components_after_removal(g: TnGraph, edge_ids: Iterable[str]) -> list[set[str]]:
    """Connected node sets after removing the edges, ordered by smallest node ID."""
    removed = _check_edges(g, edge_ids)
    components = [set(c) for c in nx.connected_components(g.to_networkx(without=removed))]
    return sorted(components, key=min)


# =============================================================================
# Gauge freedom
# =============================================================================


def apply_gauge(net: TensorNetwork, transform: GaugeTransform) -> TensorNetwork:
    """
    Apply A' = A·M at the edge's first endpoint and B' = M⁻¹·B at the second.

    The evaluated tensor is unchanged.
    """
    g = net.graph
    edge = g.edge(transform.edge)
    if edge.is_visible:
        raise VisibleEdgeError(f"gauge transforms act on hidden edges; {edge.id!r} is visible")
    m = transform.matrix
    if m.shape != (edge.dim, edge.dim):
        raise DimensionMismatchError(f"gauge matrix {m.shape} does not match edge dim {edge.dim}")
    condition = np.linalg.cond(m)
    if not np.isfinite(condition) or condition > settings.gauge_max_condition:
        raise SingularGaugeError(f"gauge matrix condition number {condition:.3g} exceeds guard")
    m_inv = np.linalg.inv(m)

    u, w = edge.endpoints
    k_u, k_w = g.mode(u, edge.id), g.mode(w, edge.id)
    a = np.moveaxis(np.tensordot(net.cores[u].data, m, axes=([k_u], [0])), -1, k_u)
    b = np.moveaxis(np.tensordot(m_inv, net.cores[w].data, axes=([1], [k_w])), 0, k_w)
    return net.with_cores({u: a, w: b})


def factor_nonneg_gauge(m: ArrayLike) -> NonnegGaugeFactors | None:
    """
    Factor M = P D when both M and M⁻¹ are entrywise non-negative.

    Returns None when M is not of that form.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {m.shape}")
    condition = np.linalg.cond(m)
    if not np.isfinite(condition) or condition > settings.gauge_max_condition:
        raise SingularGaugeError(f"matrix is singular (condition number {condition:.3g})")
    scale = max(1.0, float(np.abs(m).max()))
    if np.iscomplexobj(m):
        if np.any(np.abs(m.imag) > 1e-12 * scale):
            return None
        m = m.real
    m = m.astype(np.float64)
    m_inv = np.linalg.inv(m)
    inv_scale = max(1.0, float(np.abs(m_inv).max()))
    if np.any(m < -1e-12 * scale) or np.any(m_inv < -1e-12 * inv_scale):
        return None

    n = m.shape[0]
    permutation = np.zeros((n, n))
    diagonal = np.zeros(n)
    for j in range(n):
        i = int(np.argmax(m[:, j]))
        permutation[i, j] = 1.0
        diagonal[j] = m[i, j]
    if (
        np.any(permutation.sum(axis=1) != 1.0)
        or np.any(diagonal <= 0.0)
        or not np.allclose(permutation @ np.diag(diagonal), m, atol=1e-12 * scale)
    ):
        return None
    return NonnegGaugeFactors(permutation, np.diag(diagonal))


def random_gauge(rng: np.random.Generator, edge_id: str, dim: int) -> GaugeTransform:
    """A random complex gauge, re-drawn until comfortably invertible."""
    while True:
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        if np.linalg.cond(m) < 1e4:
            return GaugeTransform(edge_id, m)


# =============================================================================
# Serialization
# =============================================================================


def network_to_document(net: TensorNetwork) -> NetworkDocument:
    g = net.graph
    nodes = []
    for node in g.nodes:
        data = net.cores[node].data
        pairs = np.stack([data.real, data.imag], axis=-1)
        nodes.append(
            NodeDocument(id=node, incident=list(g.incidence[node]), shape=list(data.shape), core=pairs.tolist())
        )
    edges = [EdgeDocument(id=e.id, endpoints=list(e.endpoints), dim=e.dim) for e in g.edges.values()]
    return NetworkDocument(nodes=nodes, edges=edges, visible_order=list(g.visible_order))


def network_from_document(doc: NetworkDocument) -> TensorNetwork:
    cores: dict[str, DenseTensor] = {}
    for node in doc.nodes:
        try:
            pairs = np.asarray(node.core, dtype=np.float64).reshape(tuple(node.shape) + (2,))
        except ValueError as e:
            raise SchemaError(f"core of node {node.id!r} does not match shape {node.shape}: {e}") from e
        cores[node.id] = DenseTensor(pairs[..., 0] + 1j * pairs[..., 1])
    edges = {e.id: Edge(e.id, tuple(e.endpoints), e.dim) for e in doc.edges}
    incidence = {node.id: tuple(node.incident) for node in doc.nodes}
    graph = TnGraph(tuple(node.id for node in doc.nodes), edges, incidence, tuple(doc.visible_order))
    return ensure_valid(TensorNetwork(graph, cores))
