"""Random networks and models for property checks."""

from __future__ import annotations

import numpy as np

from tnprob.models import BornMachine, DecoheredBM, Lps, Ugm
from tnprob.network import TensorNetwork, is_cut_set, network_from_cores


def _bond_edges(rng: np.random.Generator, n_nodes: int, extra: int) -> list[tuple[int, int]]:
    """A random spanning tree plus up to `extra` further distinct bonds."""
    bonds = [(int(rng.integers(0, i)), i) for i in range(1, n_nodes)]
    candidates = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes) if (i, j) not in bonds]
    rng.shuffle(candidates)
    return bonds + candidates[:extra]


def _core(rng: np.random.Generator, shape: tuple[int, ...], kind: str) -> np.ndarray:
    if kind == "complex":
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return rng.uniform(0.1, 1.0, size=shape)


def random_network(
    rng: np.random.Generator,
    max_nodes: int = 4,
    max_dim: int = 3,
    kind: str = "complex",
    extra_bonds: int | None = None,
    purification: bool = False,
) -> TensorNetwork:
    """
    Nodes n1..nk (k in 1..max_nodes), each with visible edge x<i> of dim 2..max_dim.

    Bonds `b<i>_<j>` (dims 1..max_dim) form a spanning tree plus random extras. With
    `purification`, node i also carries a visible edge p<i> of dim 1..max_dim.
    """
    n_nodes = int(rng.integers(1, max_nodes + 1))
    if extra_bonds is None:
        extra_bonds = int(rng.integers(0, 2))
    bonds = _bond_edges(rng, n_nodes, extra_bonds)
    incidence: dict[int, list[tuple[str, int]]] = {
        i: [(f"x{i + 1}", int(rng.integers(2, max_dim + 1)))] for i in range(n_nodes)
    }
    if purification:
        for i in range(n_nodes):
            incidence[i].append((f"p{i + 1}", int(rng.integers(1, max_dim + 1))))
    for i, j in bonds:
        dim = int(rng.integers(1, max_dim + 1))
        edge_id = f"b{i + 1}_{j + 1}"
        incidence[i].append((edge_id, dim))
        incidence[j].append((edge_id, dim))

    cores = {}
    for i in range(n_nodes):
        shape = tuple(dim for _, dim in incidence[i])
        cores[f"n{i + 1}"] = (_core(rng, shape, kind), [e for e, _ in incidence[i]])
    return network_from_cores(cores)


def random_bm(rng: np.random.Generator, max_nodes: int = 4, max_dim: int = 3) -> BornMachine:
    return BornMachine(random_network(rng, max_nodes, max_dim))


def random_dbm(rng: np.random.Generator, max_nodes: int = 4, max_dim: int = 3) -> DecoheredBM:
    """A complex BM with a random subset of its hidden edges decohered."""
    bm = random_bm(rng, max_nodes, max_dim)
    hidden = bm.net.graph.hidden_edges
    decohered = frozenset(e for e in hidden if rng.uniform() < 0.5)
    return DecoheredBM(bm, decohered)


def random_fdbm(rng: np.random.Generator, max_nodes: int = 5, max_dim: int = 3) -> DecoheredBM:
    bm = random_bm(rng, max_nodes, max_dim)
    return DecoheredBM(bm, frozenset(bm.net.graph.hidden_edges))


def random_cut_dbm(
    rng: np.random.Generator, max_nodes: int = 4, max_dim: int = 3
) -> tuple[DecoheredBM, list[str]]:
    """
    A DBM whose decohered edges contain a cut set, and that cut set.

    The cut is every bond between a random proper node subset and its complement.
    """
    while True:
        net = random_network(rng, max_nodes, max_dim, extra_bonds=int(rng.integers(0, 3)))
        nodes = net.graph.nodes
        if len(nodes) < 2:
            continue
        side = {node for node in nodes if rng.uniform() < 0.5}
        if not side or side == set(nodes):
            continue
        cut = sorted(
            e
            for e in net.graph.hidden_edges
            if (net.graph.edges[e].endpoints[0] in side) != (net.graph.edges[e].endpoints[1] in side)
        )
        if not is_cut_set(net.graph, cut):
            continue
        others = {e for e in net.graph.hidden_edges if e not in cut and rng.uniform() < 0.5}
        return DecoheredBM(BornMachine(net), frozenset(cut) | others), cut


def random_lps(rng: np.random.Generator, max_nodes: int = 3, max_dim: int = 3) -> Lps:
    net = random_network(rng, max_nodes, max_dim, purification=True)
    return Lps(net, frozenset(e for e in net.graph.visible_edges if e.startswith("p")))


def random_ugm(rng: np.random.Generator, max_vars: int = 4, max_dim: int = 3) -> Ugm:
    """Cliques of one to three variables covering every variable, entries in [0.1, 1)."""
    n_vars = int(rng.integers(1, max_vars + 1))
    variables = [(f"x{i + 1}", int(rng.integers(2, max_dim + 1))) for i in range(n_vars)]
    dims = dict(variables)
    names = list(dims)
    scopes: list[list[str]] = []
    uncovered = set(names)
    while uncovered or len(scopes) < 2:
        size = int(rng.integers(1, min(3, n_vars) + 1))
        scope = sorted(rng.choice(names, size=size, replace=False).tolist())
        scopes.append(scope)
        uncovered -= set(scope)
    cliques = [
        (f"phi{k + 1}", scope, rng.uniform(0.1, 1.0, size=tuple(dims[v] for v in scope)))
        for k, scope in enumerate(scopes)
    ]
    return Ugm.from_cliques(variables, cliques)
