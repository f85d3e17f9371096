"""
HMM-shaped UGM and Born-machine chains and the mixture likelihood.

Network builders expose the chains as models for exact inference. Training runs on a
torch engine that sweeps the chain with per-step rescaling: a forward pass for the
undirected HMM, a pure-state pass for Born amplitudes and a density-matrix pass for the
Born normalizer. Complex arithmetic is carried as explicit (real, imaginary) pairs.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import torch
from numpy.typing import ArrayLike, NDArray

from tnprob.errors import (
    EmptyDatasetError,
    OutcomeRangeError,
    PreconditionError,
    ShapeMismatchError,
    ZeroProbabilitySequenceError,
)
from tnprob.learn.params import ChainTables, HmmMixtureParams
from tnprob.models import BornMachine, MixtureFamily, Ugm
from tnprob.transforms import PhaseAssignment, ugm_to_fdbm

Pair = tuple[torch.Tensor, torch.Tensor]

TWO_PI = 2.0 * math.pi


# =============================================================================
# Network builders
# =============================================================================


def observation_name(t: int) -> str:
    return f"o{t + 1}"


def hidden_name(t: int) -> str:
    return f"h{t + 1}"


def _chain_ugm(tables: ChainTables, t_len: int) -> Ugm:
    n, d = tables.hidden_dim, tables.d_obs
    observed = [(observation_name(t), d) for t in range(t_len)]
    hidden = [(hidden_name(t), n) for t in range(t_len)]
    cliques: list[tuple[str, Sequence[str], ArrayLike]] = [("v", [hidden_name(0)], np.exp(tables.initial))]
    for t in range(t_len - 1):
        cliques.append((f"T{t + 1}", [hidden_name(t), hidden_name(t + 1)], np.exp(tables.transition)))
    for t in range(t_len):
        cliques.append((f"H{t + 1}", [hidden_name(t), observation_name(t)], np.exp(tables.emission)))
    return Ugm.from_cliques(observed + hidden, cliques, latent=[name for name, _ in hidden])


def build_hmm_ugm(p: HmmMixtureParams, component: int = 1) -> Ugm:
    """
    Undirected HMM over o1..oT with latent h1..hT and potentials exp(v), exp(T), exp(H).

    Component 1 uses the first table set (the shared magnitudes for a DBM mixture);
    component 2 exists only for the UGM mixture.
    """
    if component == 1:
        return _chain_ugm(p.first, p.t_len)
    if component == 2 and p.family is MixtureFamily.UGM:
        return _chain_ugm(p.second, p.t_len)
    raise PreconditionError(f"component {component} is not an undirected HMM for a {p.family.value} mixture")


def build_hmm_bm(p: HmmMixtureParams) -> BornMachine:
    """Coherent Born-machine component: cores exp(2πiθ)·√exp(log potential)."""
    if p.family is not MixtureFamily.DBM:
        raise PreconditionError("the Born-machine component exists only for a dbm mixture")
    phases = {"v": p.second.initial}
    for t in range(p.t_len - 1):
        phases[f"T{t + 1}"] = p.second.transition
    for t in range(p.t_len):
        phases[f"H{t + 1}"] = p.second.emission
    return ugm_to_fdbm(_chain_ugm(p.first, p.t_len), PhaseAssignment(phases)).bm


# =============================================================================
# Torch chain engine
# =============================================================================


def _cmul(a: Pair, b: Pair) -> Pair:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _cmatmul(a: Pair, b: Pair) -> Pair:
    return a[0] @ b[0] - a[1] @ b[1], a[0] @ b[1] + a[1] @ b[0]


def _transpose(a: Pair) -> Pair:
    return a[0].transpose(-1, -2), a[1].transpose(-1, -2)


def _adjoint(a: Pair) -> Pair:
    return a[0].transpose(-1, -2), -a[1].transpose(-1, -2)


def _amplitudes(log_table: torch.Tensor, turns: torch.Tensor) -> Pair:
    magnitude = torch.exp(0.5 * log_table)
    angle = TWO_PI * turns
    return magnitude * torch.cos(angle), magnitude * torch.sin(angle)


def ugm_chain_log_prob(
    log_t: torch.Tensor, log_h: torch.Tensor, log_v: torch.Tensor, obs: torch.Tensor
) -> torch.Tensor:
    """log P(o) per sequence for the undirected HMM with a global normalizer."""
    transition, emission, initial = torch.exp(log_t), torch.exp(log_h), torch.exp(log_v)

    alpha = initial * emission[:, obs[:, 0]].T
    log_num = torch.zeros(obs.shape[0], dtype=alpha.dtype)
    for t in range(1, obs.shape[1]):
        scale = alpha.sum(dim=1, keepdim=True)
        log_num = log_num + torch.log(scale.squeeze(1))
        alpha = (alpha / scale) @ transition * emission[:, obs[:, t]].T
    log_num = log_num + torch.log(alpha.sum(dim=1))

    marginal = emission.sum(dim=1)
    beta = initial * marginal
    log_z = torch.zeros((), dtype=beta.dtype)
    for _ in range(1, obs.shape[1]):
        scale = beta.sum()
        log_z = log_z + torch.log(scale)
        beta = (beta / scale) @ transition * marginal
    log_z = log_z + torch.log(beta.sum())
    return log_num - log_z


def bm_chain_log_prob(
    log_t: torch.Tensor,
    log_h: torch.Tensor,
    log_v: torch.Tensor,
    turns_t: torch.Tensor,
    turns_h: torch.Tensor,
    turns_v: torch.Tensor,
    obs: torch.Tensor,
) -> torch.Tensor:
    """log |ψ(o)|² / ‖ψ‖² per sequence for the coherent Born-machine chain."""
    a_t = _amplitudes(log_t, turns_t)
    a_h = _amplitudes(log_h, turns_h)
    a_v = _amplitudes(log_v, turns_v)

    # amplitudes: pure-state sweep
    alpha = _cmul((a_v[0].unsqueeze(0), a_v[1].unsqueeze(0)), (a_h[0][:, obs[:, 0]].T, a_h[1][:, obs[:, 0]].T))
    log_amp = torch.zeros(obs.shape[0], dtype=a_t[0].dtype)
    for t in range(1, obs.shape[1]):
        scale = torch.sqrt((alpha[0] ** 2 + alpha[1] ** 2).sum(dim=1, keepdim=True))
        log_amp = log_amp + 2.0 * torch.log(scale.squeeze(1))
        alpha = (alpha[0] / scale, alpha[1] / scale)
        alpha = _cmul(_cmatmul(alpha, a_t), (a_h[0][:, obs[:, t]].T, a_h[1][:, obs[:, t]].T))
    total = (alpha[0].sum(dim=1), alpha[1].sum(dim=1))
    log_amp = log_amp + torch.log(total[0] ** 2 + total[1] ** 2)

    # normalizer: density-matrix sweep, ρ ← (Aᵀ ρ Ā) ∘ G with G = A_H A_H†
    gram = _cmatmul(a_h, _adjoint(a_h))
    column = (a_v[0].unsqueeze(1), a_v[1].unsqueeze(1))
    rho = _cmul(_cmatmul(column, _adjoint(column)), gram)
    log_norm = torch.zeros((), dtype=rho[0].dtype)
    conj_t = (a_t[0], -a_t[1])
    for _ in range(1, obs.shape[1]):
        trace = torch.diagonal(rho[0]).sum()
        log_norm = log_norm + torch.log(trace)
        rho = (rho[0] / trace, rho[1] / trace)
        rho = _cmul(_cmatmul(_cmatmul(_transpose(a_t), rho), conj_t), gram)
    log_norm = log_norm + torch.log(rho[0].sum())
    return log_amp - log_norm


def torch_tables(p: HmmMixtureParams, requires_grad: bool = False) -> list[torch.Tensor]:
    """Seven leaf tensors in vector order: first T, H, v, second T, H, v, logit."""
    arrays = [*p.first.arrays(), *p.second.arrays(), np.asarray(p.logit)]
    return [torch.tensor(np.array(a), dtype=torch.float64, requires_grad=requires_grad) for a in arrays]


def params_from_tables(p: HmmMixtureParams, tables: Sequence[torch.Tensor]) -> HmmMixtureParams:
    values = [t.detach().cpu().numpy() for t in tables]
    return HmmMixtureParams(
        p.family, ChainTables(*values[:3]), ChainTables(*values[3:6]), float(values[6]), p.t_len
    )


def mixture_log_prob_torch(
    family: MixtureFamily, tables: Sequence[torch.Tensor], obs: torch.Tensor
) -> torch.Tensor:
    """log(λ P₁ + (1-λ) P₂) per sequence, λ = sigmoid(logit)."""
    t1, h1, v1, t2, h2, v2, logit = tables
    first = ugm_chain_log_prob(t1, h1, v1, obs)
    if family is MixtureFamily.UGM:
        second = ugm_chain_log_prob(t2, h2, v2, obs)
    else:
        second = bm_chain_log_prob(t1, h1, v1, t2, h2, v2, obs)
    return torch.logaddexp(
        torch.nn.functional.logsigmoid(logit) + first,
        torch.nn.functional.logsigmoid(-logit) + second,
    )


def as_observations(p: HmmMixtureParams, sequences: ArrayLike) -> torch.Tensor:
    """Zero-based symbol array (M, T) checked against the parameters."""
    obs = np.array(sequences, dtype=np.int64)
    if obs.ndim == 1:
        obs = obs[None, :]
    if obs.shape[0] == 0:
        raise EmptyDatasetError("no sequences given")
    if obs.ndim != 2 or obs.shape[1] != p.t_len:
        raise ShapeMismatchError(f"sequences must have length {p.t_len}, got shape {obs.shape}")
    bad = np.argwhere((obs < 0) | (obs >= p.d_obs))
    if bad.size:
        row, col = bad[0]
        raise OutcomeRangeError(f"symbol {obs[row, col]} at sequence {row}, step {col} outside 0..{p.d_obs - 1}")
    return torch.from_numpy(obs)


def _check_finite(log_probs: torch.Tensor) -> None:
    bad = ~torch.isfinite(log_probs)
    if bool(bad.any()):
        index = int(torch.nonzero(bad)[0, 0])
        raise ZeroProbabilitySequenceError(f"sequence {index} has zero or non-finite likelihood", index)


# =============================================================================
# Public likelihood API
# =============================================================================


def mixture_log_prob(p: HmmMixtureParams, sequences: ArrayLike) -> NDArray[np.float64]:
    """log mixture probability of each sequence (zero-based symbols)."""
    obs = as_observations(p, sequences)
    with torch.no_grad():
        return mixture_log_prob_torch(p.family, torch_tables(p), obs).numpy()


def mixture_prob(p: HmmMixtureParams, sequence: ArrayLike) -> float:
    """Mixture probability of one sequence."""
    return float(np.exp(mixture_log_prob(p, sequence)[0]))


def nll(p: HmmMixtureParams, sequences: ArrayLike) -> float:
    """Mean negative log-likelihood over a dataset."""
    obs = as_observations(p, sequences)
    with torch.no_grad():
        log_probs = mixture_log_prob_torch(p.family, torch_tables(p), obs)
    _check_finite(log_probs)
    return float(-log_probs.mean())


def nll_and_grad(p: HmmMixtureParams, sequences: ArrayLike) -> tuple[float, HmmMixtureParams]:
    obs = as_observations(p, sequences)
    tables = torch_tables(p, requires_grad=True)
    log_probs = mixture_log_prob_torch(p.family, tables, obs)
    _check_finite(log_probs)
    loss = -log_probs.mean()
    # with t_len = 1 the transition tables take no part in the graph
    grads = torch.autograd.grad(loss, tables, allow_unused=True)
    grads = tuple(torch.zeros_like(t) if g is None else g for g, t in zip(grads, tables))
    return float(loss.detach()), params_from_tables(p, grads)


def nll_grad(p: HmmMixtureParams, sequences: ArrayLike) -> HmmMixtureParams:
    """Reverse-mode gradient of the mean NLL, shaped like the parameters."""
    return nll_and_grad(p, sequences)[1]
