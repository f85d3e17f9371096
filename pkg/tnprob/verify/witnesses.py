"""Frozen models that exhibit the coherent-edge effects, plus their non-negative controls."""

from __future__ import annotations

import numpy as np

from tnprob.models import BornMachine, DecoheredBM, Ugm
from tnprob.network import GaugeTransform, network_from_cores
from tnprob.transforms import ugm_to_fdbm
from tnprob.verify.random_models import random_ugm

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)

# hidden edge shared by the two-node witnesses
WITNESS_EDGE = "z"


def observer_witness() -> BornMachine:
    """
    Two Hadamard cores a(x, z) and b(z, y).

    ψ = H·H = I puts mass 1/2 on each of (0, 0) and (1, 1). Reading out z destroys the
    interference and leaves the uniform table: total variation 1/2.
    """
    net = network_from_cores({"a": (HADAMARD, ["x", WITNESS_EDGE]), "b": (HADAMARD, [WITNESS_EDGE, "y"])})
    return BornMachine(net)


def gauge_witness() -> tuple[DecoheredBM, GaugeTransform]:
    """
    Identity cores a(x, z), b(z, y) with z decohered, and a Hadamard gauge on z.

    The gauge leaves ψ alone but moves the DBM table from diag(1/2, 1/2) to uniform.
    """
    eye = np.eye(2)
    net = network_from_cores({"a": (eye, ["x", WITNESS_EDGE]), "b": (eye, [WITNESS_EDGE, "y"])})
    return DecoheredBM(BornMachine(net), frozenset({WITNESS_EDGE})), GaugeTransform(WITNESS_EDGE, HADAMARD)


def decohered_chain(rng: np.random.Generator, bond_dim: int = 2) -> DecoheredBM:
    """
    Chain X1 - Z - (X2, X3): node n1(x1, z), n2(z, x2, w), n3(w, x3) with z decohered.

    Conditioning on Z splits the composite network into two independent pieces, so
    X1 ⟂ (X2, X3) | Z for any complex cores.
    """

    def core(*shape: int) -> np.ndarray:
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    net = network_from_cores(
        {
            "n1": (core(2, bond_dim), ["x1", "z"]),
            "n2": (core(bond_dim, 2, bond_dim), ["z", "x2", "w"]),
            "n3": (core(bond_dim, 2), ["w", "x3"]),
        }
    )
    return DecoheredBM(BornMachine(net), frozenset({"z"}))


def nonnegative_control(rng: np.random.Generator) -> tuple[BornMachine, Ugm]:
    """
    A real non-negative BM in dual form (every bond touches a visible copy node).

    Its coherences vanish already, so reading out any bond changes nothing.
    """
    ugm = random_ugm(rng)
    return ugm_to_fdbm(ugm).bm, ugm
