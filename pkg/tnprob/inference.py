"""
Exact inference by copy-tensor contraction.

Every model family reduces to a probability network: a tensor network whose evaluation is
entrywise non-negative and proportional to the model's distribution. Marginalizing caps a
visible edge with Δ₁, conditioning caps it with e_x.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping

import numpy as np
from numpy.typing import NDArray

from tnprob.config import settings
from tnprob.errors import (
    DegenerateModelError,
    InvalidNetworkError,
    UndefinedConditionalError,
    UnknownVariableError,
    VisibleEdgeError,
)
from tnprob.models import (
    BornMachine,
    DecoheredBM,
    Distribution,
    Lps,
    Model,
    Ugm,
    check_outcome,
)
from tnprob.network import (
    TensorNetwork,
    ValidationReport,
    Violation,
    cap_visible_edges,
    evaluate,
    evaluate_scaled,
    network_from_cores,
    promote_hidden_edge,
)
from tnprob.tensor import DenseTensor, basis_vector, copy_tensor

logger = logging.getLogger(__name__)


# =============================================================================
# Composite networks
# =============================================================================


def build_composite(m: BornMachine | DecoheredBM) -> TensorNetwork:
    """
    The doubled network of ψ and ψ̄ whose evaluation is the unnormalized distribution.

    Ket nodes keep their IDs, bra nodes are `<node>*`. Coherent bonds become `<edge>` and
    `<edge>*`. Each visible variable x is merged through node `C@x` (Δ₃). Each decohered
    edge η carries node `D@η` (Δ₄) joining `η@u`, `η@w`, `η*@u` and `η*@w`.
    """
    dbm = m if isinstance(m, DecoheredBM) else DecoheredBM(m)
    g = dbm.net.graph
    cores: dict[str, tuple[DenseTensor | NDArray[np.complex128], list[str]]] = {}

    def ket_label(node: str, edge_id: str) -> str:
        if g.edges[edge_id].is_visible:
            return f"{edge_id}@ket"
        if edge_id in dbm.decohered:
            return f"{edge_id}@{node}"
        return edge_id

    def bra_label(node: str, edge_id: str) -> str:
        if g.edges[edge_id].is_visible:
            return f"{edge_id}@bra"
        if edge_id in dbm.decohered:
            return f"{edge_id}*@{node}"
        return f"{edge_id}*"

    for node in g.nodes:
        data = dbm.net.cores[node].data
        cores[node] = (data, [ket_label(node, e) for e in g.incidence[node]])
    for node in g.nodes:
        data = dbm.net.cores[node].data
        cores[f"{node}*"] = (np.conj(data), [bra_label(node, e) for e in g.incidence[node]])
    for var in g.visible_order:
        cores[f"C@{var}"] = (copy_tensor(3, g.dim(var)), [f"{var}@ket", f"{var}@bra", var])
    for edge_id in sorted(dbm.decohered):
        u, w = g.edges[edge_id].endpoints
        labels = [f"{edge_id}@{u}", f"{edge_id}@{w}", f"{edge_id}*@{u}", f"{edge_id}*@{w}"]
        cores[f"D@{edge_id}"] = (copy_tensor(4, g.dim(edge_id)), labels)

    if len(cores) != 2 * len(g.nodes) + len(g.visible_order) + len(dbm.decohered):
        raise InvalidNetworkError(
            ValidationReport(
                (Violation("name-clash", "composite", "node IDs collide with composite naming"),)
            )
        )
    return network_from_cores(cores, visible_order=g.visible_order)


def probability_network(model: Model) -> TensorNetwork:
    """Network whose evaluation is proportional to the model's distribution."""
    if isinstance(model, Ugm):
        return model.net
    if isinstance(model, (BornMachine, DecoheredBM)):
        return build_composite(model)
    if isinstance(model, Lps):
        composite = build_composite(BornMachine(model.net))
        caps = {e: copy_tensor(1, composite.graph.dim(e)) for e in sorted(model.purification)}
        return cap_visible_edges(composite, caps)
    raise TypeError(f"not a model: {type(model).__name__}")


def variables(model: Model | TensorNetwork) -> tuple[tuple[str, int], ...]:
    net = model if isinstance(model, TensorNetwork) else probability_network(model)
    return tuple((e, net.graph.dim(e)) for e in net.visible_order)


def _normalize(net: TensorNetwork, log_evidence: float = 0.0) -> Distribution:
    tensor, log_scale = evaluate_scaled(net)
    return Distribution.from_unnormalized(variables(net), tensor, log_scale, log_evidence)


# =============================================================================
# Distributions
# =============================================================================


def distribution(model: Model) -> Distribution:
    """The normalized distribution of any model family."""
    return _normalize(probability_network(model))


def ugm_prob(m: Ugm) -> Distribution:
    return distribution(m)


def bm_prob(m: BornMachine) -> Distribution:
    """|ψ_x|² / ‖ψ‖² through the composite network."""
    return distribution(m)


def dbm_prob(m: DecoheredBM) -> Distribution:
    dist = distribution(m)
    if dist.raw_min < -settings.negative_tolerance:
        logger.warning(f"⚠️ DBM table has negative entry {dist.raw_min:.3g} before clamping")
    return dist


def lps_prob(m: Lps) -> Distribution:
    """Composite of the LPS network with every purification edge marginalized."""
    return distribution(m)


# =============================================================================
# Marginals and conditionals
# =============================================================================


def query(
    model: Model | Distribution,
    marginalize: Iterable[str] = (),
    condition: Mapping[str, int] | None = None,
) -> Distribution:
    """
    Marginalize and condition in one contraction.

    Outcomes are zero-based. The result's `log_evidence` is log P(condition).
    """
    condition = dict(condition or {})
    marginalize = list(dict.fromkeys(marginalize))
    if isinstance(model, Distribution):
        conditioned = model.condition(condition) if condition else model
        return conditioned.marginalize(marginalize)

    net = probability_network(model)
    dims = dict(variables(net))
    for name in [*marginalize, *condition]:
        if name not in dims:
            raise UnknownVariableError(f"unknown variable {name!r}; have {list(dims)}")
    for name, outcome in condition.items():
        check_outcome(name, outcome, dims[name])
    overlap = set(marginalize) & set(condition)
    if overlap:
        raise UnknownVariableError(f"variables both marginalized and conditioned: {sorted(overlap)}")

    caps: dict[str, DenseTensor] = {name: copy_tensor(1, dims[name]) for name in marginalize}
    caps.update({name: basis_vector(outcome, dims[name]) for name, outcome in condition.items()})
    if not condition:
        return _normalize(cap_visible_edges(net, caps))

    # P(condition) = Z(condition) / Z, both from fully capped networks
    everything = {name: copy_tensor(1, dim) for name, dim in dims.items()}
    evidence = {**everything, **{name: caps[name] for name in condition}}
    z_all, log_all = evaluate_scaled(cap_visible_edges(net, everything))
    z_cond, log_cond = evaluate_scaled(cap_visible_edges(net, evidence))
    total, mass = z_all.item().real, z_cond.item().real
    if total <= 0.0:
        raise DegenerateModelError("model sums to zero")
    probability = (mass / total) * math.exp(log_cond - log_all) if mass > 0.0 else 0.0
    if probability <= settings.zero_support:
        raise UndefinedConditionalError(f"conditioning event {condition} has probability {probability:.3g}")
    return _normalize(cap_visible_edges(net, caps), log_evidence=math.log(probability))


def marginalize(model: Model | Distribution, names: Iterable[str]) -> Distribution:
    return query(model, marginalize=names)


def condition(model: Model | Distribution, assignment: Mapping[str, int]) -> Distribution:
    return query(model, condition=assignment)


def edge_density_matrix(model: BornMachine | DecoheredBM, edge_id: str) -> NDArray[np.complex128]:
    """
    Trace-normalized density matrix carried by a hidden edge, all variables marginalized.

    The edge is treated as coherent; other decohered edges stay decohered. The diagonal is
    the distribution of the edge's readout variable, the off-diagonals are its coherences.
    """
    dbm = model if isinstance(model, DecoheredBM) else DecoheredBM(model)
    g = dbm.net.graph
    if g.edge(edge_id).is_visible:
        raise VisibleEdgeError(f"edge {edge_id!r} is visible")
    composite = build_composite(DecoheredBM(dbm.bm, dbm.decohered - {edge_id}))
    composite = promote_hidden_edge(composite, edge_id, "rho@ket")
    composite = promote_hidden_edge(composite, f"{edge_id}*", "rho@bra")
    caps = {var: copy_tensor(1, g.dim(var)) for var in g.visible_order}
    rho = evaluate(cap_visible_edges(composite, caps)).data
    trace = np.trace(rho).real
    if trace <= 0.0:
        raise DegenerateModelError(f"density matrix on {edge_id!r} has zero trace")
    return np.asarray(rho / trace)
