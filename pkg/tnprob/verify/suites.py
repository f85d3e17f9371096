"""
Verification suites for the conversions, readout effects, gauge freedom and likelihoods.

Each suite draws its models from its own seeded stream and reports one check per
property, carrying the worst residual over all trials.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator

import numpy as np

from tnprob.config import settings
from tnprob.inference import (
    bm_prob,
    build_composite,
    dbm_prob,
    edge_density_matrix,
    lps_prob,
    marginalize,
    ugm_prob,
)
from tnprob.learn import init_params, mixture_log_prob, mixture_prob, nll, nll_and_grad
from tnprob.learn.params import ChainTables, HmmMixtureParams
from tnprob.models import BornMachine, DecoheredBM, Distribution, MixtureFamily, Ugm
from tnprob.network import apply_gauge, evaluate, factor_nonneg_gauge, network_from_cores, random_gauge
from tnprob.schemas import CheckResult
from tnprob.transforms import (
    PhaseAssignment,
    check_cond_independence,
    dbm_to_lps,
    fdbm_to_ugm,
    force_readout_bm,
    latent_cut_residual,
    lps_to_dbm,
    readout_edge,
    readout_variable,
    ugm_to_fdbm,
)
from tnprob.verify.base import BaseSuite, relative_residual
from tnprob.verify.oracles import brute_force_evaluate, brute_force_mixture_prob
from tnprob.verify.random_models import (
    random_bm,
    random_cut_dbm,
    random_dbm,
    random_fdbm,
    random_lps,
    random_network,
    random_ugm,
)
from tnprob.verify.registry import SuiteRegistry
from tnprob.verify.witnesses import (
    WITNESS_EDGE,
    decohered_chain,
    gauge_witness,
    nonnegative_control,
    observer_witness,
)


def _table_residual(p: Distribution, q: Distribution) -> float:
    if p.variables != q.variables:
        return float("inf")
    return relative_residual(p.table, q.table)


def _negativity(dist: Distribution) -> float:
    return max(0.0, -dist.raw_min)


def _pick_hidden(rng: np.random.Generator, edges: tuple[str, ...] | list[str]) -> str:
    return str(edges[int(rng.integers(0, len(edges)))])


def _bm_with_hidden_edge(rng: np.random.Generator, max_nodes: int = 4) -> tuple[BornMachine, str]:
    while True:
        bm = random_bm(rng, max_nodes=max_nodes)
        if bm.net.graph.hidden_edges:
            return bm, _pick_hidden(rng, bm.net.graph.hidden_edges)


def _dbm_with_decohered_edge(rng: np.random.Generator) -> tuple[DecoheredBM, str]:
    while True:
        dbm = random_dbm(rng)
        if dbm.decohered:
            return dbm, _pick_hidden(rng, sorted(dbm.decohered))


@SuiteRegistry.register("thm1")
class FullyDecoheredSuite(BaseSuite):
    DESCRIPTION = "fully decohered BMs equal the UGM of their squared-modulus cores"
    DEFAULT_TRIALS = 50

    def checks(self) -> Iterator[CheckResult]:
        single = DecoheredBM(BornMachine(network_from_cores({"n": ([1 + 1j, 2.0], ["x"])})))
        ugm = fdbm_to_ugm(single)
        yield self.within(
            "single node [1+i, 2] squares to [2, 4]",
            relative_residual(ugm.net.cores["n"].data, [2.0, 4.0]),
            witness={"potential": np.real(ugm.net.cores["n"].data).tolist()},
        )
        yield self.within("single node gives [1/3, 2/3]", relative_residual(dbm_prob(single).table, [1 / 3, 2 / 3]))

        residuals, negativity = [], []
        for _ in range(self.trials):
            m = random_fdbm(self.rng, max_nodes=5, max_dim=3)
            p = dbm_prob(m)
            residuals.append(_table_residual(p, ugm_prob(fdbm_to_ugm(m))))
            negativity.append(_negativity(p))
        yield self.worst("dbm_prob equals ugm_prob of the converted model", residuals)
        yield self.worst("DBM tables non-negative before clamping", negativity, settings.negative_tolerance)


@SuiteRegistry.register("cor1")
class PhaseIndependenceSuite(BaseSuite):
    DESCRIPTION = "UGM to fully decohered BM conversion is independent of the phases"
    DEFAULT_TRIALS = 50
    PHASE_DRAWS = 5

    def checks(self) -> Iterator[CheckResult]:
        example = Ugm(network_from_cores({"phi": ([4.0, 9.0], ["x"])}))
        fdbm = ugm_to_fdbm(example)
        yield self.within("zero phases take square roots", relative_residual(fdbm.net.cores["phi"].data, [2.0, 3.0]))
        yield self.within(
            "[4, 9] gives [4/13, 9/13] for any phase",
            relative_residual(
                dbm_prob(ugm_to_fdbm(example, PhaseAssignment.random(example, self.rng))).table, [4 / 13, 9 / 13]
            ),
        )

        invariance, round_trip = [], []
        for _ in range(self.trials):
            m = random_ugm(self.rng)
            reference = ugm_prob(m)
            for _ in range(self.PHASE_DRAWS):
                phased = ugm_to_fdbm(m, PhaseAssignment.random(m, self.rng))
                invariance.append(_table_residual(dbm_prob(phased), reference))
                back = fdbm_to_ugm(phased)
                round_trip.append(
                    max(relative_residual(back.net.cores[v].data, m.net.cores[v].data) for v in m.net.nodes)
                )
        yield self.worst("distribution invariant under random phases", invariance)
        yield self.worst("potentials recovered by the round trip", round_trip)


@SuiteRegistry.register("thm2")
class DecoheredCutSuite(BaseSuite):
    DESCRIPTION = "a decohered cut set makes the two sides conditionally independent given its readout"
    DEFAULT_TRIALS = 30
    COUNTEREXAMPLE_THRESHOLD = 0.01

    def checks(self) -> Iterator[CheckResult]:
        chain = decohered_chain(self.rng)
        report = check_cond_independence(chain, ["z"])
        yield self.within(
            "X1 independent of (X2, X3) given Z on a decohered chain",
            report.max_residual,
            witness={"partition": [list(side) for side in report.partition]},
        )

        coherent = latent_cut_residual(observer_witness(), [WITNESS_EDGE])
        yield self.exceeds(
            "coherent cut edge admits no latent explanation",
            coherent,
            self.COUNTEREXAMPLE_THRESHOLD,
            witness={"model": "observer witness", "edge": WITNESS_EDGE},
        )

        residuals, negativity = [], []
        for _ in range(self.trials):
            m, cut = random_cut_dbm(self.rng)
            residuals.append(check_cond_independence(m, cut, tol=self.tolerance).max_residual)
            negativity.append(_negativity(dbm_prob(m)))
        yield self.worst("independence residual across random decohered cuts", residuals)
        yield self.worst("DBM tables non-negative before clamping", negativity, settings.negative_tolerance)


@SuiteRegistry.register("lps")
class PurificationSuite(BaseSuite):
    DESCRIPTION = "LPS and DBM conversions preserve distributions"
    DEFAULT_TRIALS = 30

    def checks(self) -> Iterator[CheckResult]:
        to_dbm, counts = [], []
        for _ in range(self.trials):
            m = random_lps(self.rng)
            converted = lps_to_dbm(m)
            to_dbm.append(_table_residual(dbm_prob(converted), lps_prob(m)))
            g, h = m.net.graph, converted.net.graph
            n, hidden = len(g.nodes), len(g.hidden_edges)
            expected = (2 * n, n, hidden + n)
            actual = (len(h.nodes), len(h.visible_edges), len(h.hidden_edges))
            counts.append(float(sum(a != e for a, e in zip(actual, expected))))
        yield self.worst("lps_to_dbm preserves the distribution", to_dbm)
        yield self.worst("lps_to_dbm has 2n nodes, n visible and m+n hidden edges", counts, 0.0)

        to_lps, round_trip = [], []
        for _ in range(self.trials):
            m = random_dbm(self.rng)
            lps = dbm_to_lps(m)
            reference = dbm_prob(m)
            to_lps.append(_table_residual(lps_prob(lps), reference))
            round_trip.append(_table_residual(dbm_prob(lps_to_dbm(lps)), reference))
        yield self.worst("dbm_to_lps preserves the distribution", to_lps)
        yield self.worst("dbm_to_lps then lps_to_dbm preserves the distribution", round_trip)


@SuiteRegistry.register("observer")
class ObserverEffectSuite(BaseSuite):
    DESCRIPTION = "reading out a coherent hidden edge changes a BM; decohered readout does not"
    DEFAULT_TRIALS = 20
    WITNESS_THRESHOLD = 0.05
    CONTROL_TOLERANCE = 1e-12

    def checks(self) -> Iterator[CheckResult]:
        forced = force_readout_bm(observer_witness(), WITNESS_EDGE)
        yield self.exceeds(
            "forced readout changes the frozen witness",
            forced.total_variation,
            self.WITNESS_THRESHOLD,
            witness={"before": forced.before.table.tolist(), "after": forced.after.table.tolist()},
        )

        equivalence, controls, recovered, density = [], [], [], []
        for _ in range(self.trials):
            bm, edge = _bm_with_hidden_edge(self.rng)
            after = force_readout_bm(bm, edge).after
            equivalence.append(_table_residual(after, dbm_prob(DecoheredBM(bm, frozenset({edge})))))

            control, _ = nonnegative_control(self.rng)
            edge = _pick_hidden(self.rng, control.net.graph.hidden_edges)
            controls.append(force_readout_bm(control, edge).total_variation)

            dbm, edge = _dbm_with_decohered_edge(self.rng)
            read = readout_edge(dbm, edge)
            variable = readout_variable(edge)
            recovered.append(_table_residual(marginalize(read, [variable]), dbm_prob(dbm)))
            z = marginalize(read, [v for v in dbm.net.visible_order])
            diagonal = np.real(np.diag(edge_density_matrix(dbm, edge)))
            density.append(relative_residual(z.table, diagonal))
        yield self.worst("forced readout equals decohering the edge", equivalence)
        yield self.worst("non-negative dual-form controls do not change", controls, self.CONTROL_TOLERANCE)
        yield self.worst("marginalizing a readout recovers the DBM", recovered)
        yield self.worst("readout marginal equals the density-matrix diagonal", density)


@SuiteRegistry.register("gauge")
class GaugeSuite(BaseSuite):
    DESCRIPTION = "BMs are gauge invariant, decohered edges are not, and P·D is the non-negative gauge"
    DEFAULT_TRIALS = 30
    DEFAULT_TOLERANCE = 1e-8
    FACTOR_SAMPLES = 100
    WITNESS_THRESHOLD = 0.01

    def _matrix(self) -> np.ndarray:
        """A matrix from one of five families, with and without the P·D form."""
        d = int(self.rng.integers(1, 5))
        monomial = np.eye(d)[self.rng.permutation(d)] * self.rng.uniform(0.5, 2.0, size=d)
        kind = int(self.rng.integers(0, 5))
        if kind == 0:
            return monomial
        if kind == 1:
            return self.rng.uniform(0.0, 1.0, size=(d, d)) + np.eye(d)
        if kind == 2:
            return self.rng.normal(size=(d, d)) + 3.0 * np.eye(d)
        if kind == 3:
            i, j = self.rng.integers(0, d, size=2)
            return monomial + 0.5 * (np.eye(d)[i][:, None] * np.eye(d)[j][None, :])
        flipped = monomial.copy()
        flipped[np.nonzero(monomial)[0][0], np.nonzero(monomial)[1][0]] *= -1.0
        return flipped

    def checks(self) -> Iterator[CheckResult]:
        dbm, transform = gauge_witness()
        gauged = DecoheredBM(BornMachine(apply_gauge(dbm.net, transform)), dbm.decohered)
        tv = dbm_prob(dbm).total_variation(dbm_prob(gauged))
        yield self.exceeds(
            "Hadamard gauge on a decohered edge changes the DBM",
            tv,
            self.WITNESS_THRESHOLD,
            witness={"edge": WITNESS_EDGE, "matrix": transform.matrix.real.tolist()},
        )

        tensors, tables = [], []
        for _ in range(self.trials):
            bm, edge = _bm_with_hidden_edge(self.rng)
            t = random_gauge(self.rng, edge, bm.net.graph.dim(edge))
            moved = apply_gauge(bm.net, t)
            tensors.append(relative_residual(evaluate(moved).data, evaluate(bm.net).data))
            tables.append(_table_residual(bm_prob(BornMachine(moved)), bm_prob(bm)))
        yield self.worst("evaluation invariant under random gauges", tensors)
        yield self.worst("bm_prob invariant under random gauges", tables)

        samples = self.FACTOR_SAMPLES if self.trials else 0
        mismatches = 0.0
        for _ in range(samples):
            m = self._matrix()
            inverse = np.linalg.inv(m)
            expected = bool(np.all(m >= 0.0) and np.all(inverse >= -1e-12 * max(1.0, np.abs(inverse).max())))
            factors = factor_nonneg_gauge(m)
            if (factors is not None) != expected:
                mismatches += 1
            elif factors is not None and not np.allclose(factors.permutation @ factors.diagonal, m):
                mismatches += 1
        yield self.within(
            "P·D factorization agrees with the sign oracle", mismatches, 0.0, witness={"samples": samples}
        )


@SuiteRegistry.register("nonneg")
class NonnegativitySuite(BaseSuite):
    DESCRIPTION = "contraction matches enumeration and DBM tables are non-negative and normalized"
    DEFAULT_TRIALS = 30
    NORMALIZATION_TOLERANCE = 1e-12

    def checks(self) -> Iterator[CheckResult]:
        networks, composites, negativity, normalization = [], [], [], []
        for _ in range(self.trials):
            net = random_network(self.rng, max_nodes=4, max_dim=3)
            networks.append(relative_residual(evaluate(net).data, brute_force_evaluate(net)))

            small = random_dbm(self.rng, max_nodes=2, max_dim=2)
            composite = build_composite(small)
            composites.append(relative_residual(evaluate(composite).data, brute_force_evaluate(composite)))

            dist = dbm_prob(random_dbm(self.rng))
            negativity.append(_negativity(dist))
            normalization.append(abs(float(dist.table.sum()) - 1.0))
        yield self.worst("evaluate matches hidden-index enumeration", networks)
        yield self.worst("composite matches hidden-index enumeration", composites)
        yield self.worst("DBM tables non-negative before clamping", negativity, settings.negative_tolerance)
        yield self.worst("tables sum to one", normalization, self.NORMALIZATION_TOLERANCE)


@SuiteRegistry.register("grad")
class LikelihoodSuite(BaseSuite):
    DESCRIPTION = "mixture likelihoods match path enumeration and gradients match finite differences"
    DEFAULT_TRIALS = 20
    DEFAULT_TOLERANCE = 1e-4
    ORACLE_TOLERANCE = 1e-10
    COLLAPSE_TOLERANCE = 1e-12
    STEP = 1e-5

    def _params(self, family: MixtureFamily, max_hidden: int, max_len: int) -> HmmMixtureParams:
        hidden_dim = int(self.rng.integers(1, max_hidden + 1))
        t_len = int(self.rng.integers(1, max_len + 1))
        return init_params(family, hidden_dim, 2, t_len, seed=int(self.rng.integers(0, 2**31)))

    def _finite_differences(self, p: HmmMixtureParams, data: np.ndarray) -> np.ndarray:
        x = p.to_vector()
        grad = np.zeros_like(x)
        for i in range(x.size):
            up, down = x.copy(), x.copy()
            up[i] += self.STEP
            down[i] -= self.STEP
            grad[i] = (nll(p.from_vector(up), data) - nll(p.from_vector(down), data)) / (2 * self.STEP)
        return grad

    def checks(self) -> Iterator[CheckResult]:
        for family in MixtureFamily:
            gradients, oracle = [], []
            for _ in range(self.trials):
                p = self._params(family, max_hidden=4, max_len=8)
                data = self.rng.integers(0, 2, size=(4, p.t_len))
                _, grad = nll_and_grad(p, data)
                gradients.append(relative_residual(grad.to_vector(), self._finite_differences(p, data)))

                q = self._params(family, max_hidden=3, max_len=5)
                sequence = self.rng.integers(0, 2, size=q.t_len)
                oracle.append(relative_residual(mixture_prob(q, sequence), brute_force_mixture_prob(q, sequence)))
            yield self.worst(f"{family.value} gradient matches central differences", gradients)
            yield self.worst(f"{family.value} mixture_prob matches path enumeration", oracle, self.ORACLE_TOLERANCE)

        collapse = []
        for _ in range(self.trials):
            p = self._params(MixtureFamily.DBM, max_hidden=1, max_len=8)
            zero = ChainTables(*(np.zeros_like(a) for a in p.second.arrays()))
            sequences = np.array(list(itertools.product(range(2), repeat=p.t_len)))
            values = [
                mixture_log_prob(HmmMixtureParams(p.family, p.first, zero, logit, p.t_len), sequences)
                for logit in (-3.0, 0.0, 3.0)
            ]
            collapse.append(max(float(np.abs(v - values[0]).max()) for v in values))
        yield self.worst(
            "zero phases make a one-state dbm mixture independent of the weight", collapse, self.COLLAPSE_TOLERANCE
        )
