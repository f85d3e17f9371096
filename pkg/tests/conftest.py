"""Shared fixtures."""

import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

from tnprob.models import BornMachine, DecoheredBM, Ugm
from tnprob.network import TensorNetwork, network_from_cores
from tnprob.verify import SuiteRegistry

hypothesis_settings.register_profile("tnprob", max_examples=25, deadline=None)
hypothesis_settings.load_profile("tnprob")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def factorization() -> TensorNetwork:
    """Two nodes sharing one bond: M (2x3) and N (3x2)."""
    m = np.arange(1, 7, dtype=float).reshape(2, 3) + 1j
    n = np.arange(6, 0, -1, dtype=float).reshape(3, 2)
    return network_from_cores({"m": (m, ["a", "r"]), "n": (n, ["r", "b"])})


@pytest.fixture
def four_node_network(rng: np.random.Generator) -> TensorNetwork:
    """Four nodes, visible e1..e4, bonds e12, e23, e13, e34, random complex cores."""

    def core(*shape: int) -> np.ndarray:
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    return network_from_cores(
        {
            "1": (core(2, 2, 2), ["e1", "e12", "e13"]),
            "2": (core(2, 2, 2), ["e2", "e12", "e23"]),
            "3": (core(2, 2, 2, 2), ["e3", "e13", "e23", "e34"]),
            "4": (core(2, 2), ["e4", "e34"]),
        }
    )


@pytest.fixture
def chain_dbm(rng: np.random.Generator) -> DecoheredBM:
    """Three-node chain x1 - b12 - x2 - b23 - x3 with the middle bonds' first one decohered."""

    def core(*shape: int) -> np.ndarray:
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    net = network_from_cores(
        {
            "n1": (core(2, 3), ["x1", "b12"]),
            "n2": (core(3, 2, 2), ["b12", "x2", "b23"]),
            "n3": (core(2, 2), ["b23", "x3"]),
        }
    )
    return DecoheredBM(BornMachine(net), frozenset({"b12"}))


@pytest.fixture
def small_ugm() -> Ugm:
    """x1 - x2 - x3 chain with pairwise potentials."""
    return Ugm.from_cliques(
        [("x1", 2), ("x2", 3), ("x3", 2)],
        [
            ("phi12", ["x1", "x2"], [[1.0, 2.0, 0.5], [0.3, 1.0, 4.0]]),
            ("phi23", ["x2", "x3"], [[2.0, 1.0], [0.5, 0.5], [1.0, 3.0]]),
        ],
    )


@pytest.fixture
def isolated_registry():
    """Snapshot the suite registry and restore it afterwards."""
    saved = SuiteRegistry.get_all()
    yield SuiteRegistry
    SuiteRegistry.clear()
    SuiteRegistry._suites.update(saved)
