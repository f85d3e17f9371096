"""Brute-force reference computations that share no code with the contraction engine."""

from __future__ import annotations

import itertools
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from tnprob.learn.params import HmmMixtureParams
from tnprob.models import MixtureFamily
from tnprob.network import TensorNetwork


def brute_force_evaluate(net: TensorNetwork) -> NDArray[np.complex128]:
    """Sum over every hidden-index assignment of the product of core elements."""
    g = net.graph
    hidden = list(g.hidden_edges)
    visible = list(g.visible_order)
    letters = {e: chr(ord("a") + i) for i, e in enumerate(visible)}
    total = np.zeros(tuple(g.dim(e) for e in visible), dtype=np.complex128)
    for values in itertools.product(*(range(g.dim(e)) for e in hidden)):
        assignment = dict(zip(hidden, values))
        operands: list[NDArray[np.complex128]] = []
        subscripts: list[str] = []
        scalar = 1.0 + 0.0j
        for node in g.nodes:
            index = tuple(assignment.get(e, slice(None)) for e in g.incidence[node])
            piece = net.cores[node].data[index]
            labels = "".join(letters[e] for e in g.incidence[node] if e in letters)
            if labels:
                operands.append(piece)
                subscripts.append(labels)
            else:
                scalar *= complex(piece)
        out = "".join(letters[e] for e in visible)
        term = np.einsum(",".join(subscripts) + "->" + out, *operands) if operands else np.asarray(1.0)
        total = total + scalar * term
    return total


def _paths(hidden_dim: int, t_len: int) -> itertools.product:  # type: ignore[type-arg]
    return itertools.product(range(hidden_dim), repeat=t_len)


def _path_weights(
    transition: NDArray[np.complex128],
    emission: NDArray[np.complex128],
    initial: NDArray[np.complex128],
    obs: Sequence[int],
) -> complex:
    total = 0.0 + 0.0j
    for path in _paths(initial.shape[0], len(obs)):
        term = initial[path[0]] * emission[path[0], obs[0]]
        for t in range(1, len(obs)):
            term *= transition[path[t - 1], path[t]] * emission[path[t], obs[t]]
        total += term
    return complex(total)


def brute_force_mixture_prob(p: HmmMixtureParams, obs: Sequence[int]) -> float:
    """Mixture probability by enumerating every hidden path and every sequence."""
    everything = list(itertools.product(range(p.d_obs), repeat=p.t_len))

    def hmm(tables: tuple[NDArray[np.float64], ...]) -> float:
        t, h, v = (np.exp(a) for a in tables)
        z = sum(_path_weights(t, h, v, o).real for o in everything)
        return _path_weights(t, h, v, obs).real / z

    def born() -> float:
        amplitudes = [
            np.exp(0.5 * log) * np.exp(2j * np.pi * turns)
            for log, turns in zip(p.first.arrays(), p.second.arrays())
        ]
        t, h, v = amplitudes
        z = sum(abs(_path_weights(t, h, v, o)) ** 2 for o in everything)
        return abs(_path_weights(t, h, v, obs)) ** 2 / z

    first = hmm(p.first.arrays())
    second = hmm(p.second.arrays()) if p.family is MixtureFamily.UGM else born()
    weight = p.mixture_weight
    return weight * first + (1.0 - weight) * second
