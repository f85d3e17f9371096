"""Tests for family conversions, hidden-edge readout and conditional independence."""

import numpy as np
import pytest

from tnprob.errors import PreconditionError, ShapeMismatchError
from tnprob.inference import distribution, marginalize
from tnprob.models import BornMachine, DecoheredBM, Lps, Ugm
from tnprob.network import network_from_cores
from tnprob.transforms import (
    EdgeToNodeAssignment,
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
from tnprob.verify.witnesses import WITNESS_EDGE, decohered_chain, nonnegative_control, observer_witness


@pytest.fixture
def small_lps(rng) -> Lps:
    def core(*shape: int) -> np.ndarray:
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    net = network_from_cores(
        {"a": (core(2, 2, 3), ["x1", "p1", "r"]), "b": (core(3, 2, 2), ["r", "x2", "p2"])}
    )
    return Lps(net, frozenset({"p1", "p2"}))


def fully_decohered(net) -> DecoheredBM:
    return DecoheredBM(BornMachine(net), frozenset(net.graph.hidden_edges))


class TestUgmAndFullyDecohered:
    def test_squares_moduli(self):
        net = network_from_cores({"a": (np.array([1 + 1j, 2.0]), ["x"])})
        ugm = fdbm_to_ugm(fully_decohered(net))
        np.testing.assert_allclose(ugm.net.core("a").data, [2.0, 4.0])
        np.testing.assert_allclose(distribution(ugm).table, [1 / 3, 2 / 3])

    def test_distribution_preserved(self, four_node_network):
        dbm = fully_decohered(four_node_network)
        assert distribution(dbm).max_abs_diff(distribution(fdbm_to_ugm(dbm))) <= 1e-12

    def test_requires_every_edge_decohered(self, chain_dbm):
        with pytest.raises(PreconditionError):
            fdbm_to_ugm(chain_dbm)

    def test_square_roots_potentials(self):
        ugm = Ugm(network_from_cores({"a": (np.array([4.0, 9.0]), ["x"])}))
        dbm = ugm_to_fdbm(ugm)
        np.testing.assert_allclose(dbm.net.core("a").data, [2.0, 3.0])
        np.testing.assert_allclose(distribution(dbm).table, [4 / 13, 9 / 13])

    def test_any_phases_give_same_distribution(self, small_ugm, rng):
        reference = distribution(small_ugm)
        for _ in range(3):
            dbm = ugm_to_fdbm(small_ugm, PhaseAssignment.random(small_ugm, rng))
            assert dbm.fully_decohered
            assert distribution(dbm).max_abs_diff(reference) <= 1e-12

    def test_round_trip_recovers_potentials(self, small_ugm, rng):
        back = fdbm_to_ugm(ugm_to_fdbm(small_ugm, PhaseAssignment.random(small_ugm, rng)))
        for node in small_ugm.net.nodes:
            np.testing.assert_allclose(back.net.core(node).data, small_ugm.net.core(node).data, atol=1e-12)

    def test_phase_table_shape_checked(self, small_ugm):
        phases = PhaseAssignment({"phi12": np.zeros((2, 2))})
        with pytest.raises(ShapeMismatchError):
            ugm_to_fdbm(small_ugm, phases)

    def test_phase_table_must_be_finite(self):
        with pytest.raises(ValueError):
            PhaseAssignment({"a": [np.nan]})


class TestReadout:
    def test_readout_marginal_recovers_model(self, chain_dbm):
        readout = readout_edge(chain_dbm, "b12")
        variable = readout_variable("b12")
        assert variable in readout.net.visible_order
        assert "b12" not in readout.decohered
        recovered = marginalize(readout, [variable])
        assert recovered.max_abs_diff(distribution(chain_dbm)) <= 1e-12

    def test_readout_needs_decohered_edge(self, chain_dbm):
        with pytest.raises(PreconditionError):
            readout_edge(chain_dbm, "b23")

    def test_forced_readout_changes_witness(self):
        result = force_readout_bm(observer_witness(), WITNESS_EDGE)
        assert result.changed
        assert result.total_variation == pytest.approx(0.5)
        np.testing.assert_allclose(result.before.table, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)
        np.testing.assert_allclose(result.after.table, np.full((2, 2), 0.25), atol=1e-12)

    def test_forced_readout_equals_decohering(self, four_node_network):
        bm = BornMachine(four_node_network)
        result = force_readout_bm(bm, "e23")
        decohered = distribution(DecoheredBM(bm, frozenset({"e23"})))
        assert result.after.max_abs_diff(decohered) <= 1e-12

    def test_non_negative_model_is_unchanged(self, rng):
        bm, _ = nonnegative_control(rng)
        for edge_id in bm.net.graph.hidden_edges:
            result = force_readout_bm(bm, edge_id)
            assert not result.changed
            assert result.total_variation <= 1e-12

    def test_forced_readout_errors(self, chain_dbm):
        with pytest.raises(PreconditionError):
            force_readout_bm(chain_dbm, "x1")
        with pytest.raises(PreconditionError):
            force_readout_bm(chain_dbm, "b12")


class TestConditionalIndependence:
    def test_decohered_cut_separates(self, rng):
        report = check_cond_independence(decohered_chain(rng), ["z"])
        assert report.is_cut_set
        assert report.partition == (("x1",), ("x2", "x3"))
        assert report.holds
        assert len(report.residuals) + report.skipped == 2

    def test_coherent_edge_rejected(self, chain_dbm):
        with pytest.raises(PreconditionError):
            check_cond_independence(chain_dbm, ["b23"])

    def test_not_a_cut_set(self, four_node_network):
        report = check_cond_independence(fully_decohered(four_node_network), ["e12"])
        assert not report.is_cut_set
        assert report.partition[0] == ("e1",)

    def test_latent_cut_residual_of_witness(self):
        assert latent_cut_residual(observer_witness(), [WITNESS_EDGE]) == pytest.approx(0.25)

    def test_latent_cut_residual_vanishes_for_decohered_cut(self, rng):
        assert latent_cut_residual(decohered_chain(rng), ["z"]) <= 1e-12


class TestPurification:
    def test_lps_to_dbm_counts(self, small_lps):
        dbm = lps_to_dbm(small_lps)
        g = dbm.net.graph
        assert len(g.nodes) == 4
        assert len(g.visible_edges) == 2
        assert len(g.hidden_edges) == 3
        assert dbm.decohered == {"p1", "p2"}
        assert "purify@p1" in g.nodes

    def test_lps_to_dbm_preserves_distribution(self, small_lps):
        assert distribution(lps_to_dbm(small_lps)).max_abs_diff(distribution(small_lps)) <= 1e-12

    def test_dbm_to_lps_preserves_distribution(self, chain_dbm):
        lps = dbm_to_lps(chain_dbm)
        assert lps.variables == ("x1", "x2", "x3")
        assert distribution(lps).max_abs_diff(distribution(chain_dbm)) <= 1e-12

    def test_default_assignment_uses_smaller_endpoint(self, chain_dbm):
        lps = dbm_to_lps(chain_dbm)
        g = lps.net.graph
        assert (g.dim("P@n1"), g.dim("P@n2"), g.dim("P@n3")) == (3, 1, 1)

    def test_explicit_assignment(self, chain_dbm):
        lps = dbm_to_lps(chain_dbm, EdgeToNodeAssignment({"b12": "n2"}))
        g = lps.net.graph
        assert (g.dim("P@n1"), g.dim("P@n2")) == (1, 3)
        assert distribution(lps).max_abs_diff(distribution(chain_dbm)) <= 1e-12

    def test_round_trip(self, chain_dbm):
        back = lps_to_dbm(dbm_to_lps(chain_dbm))
        assert distribution(back).max_abs_diff(distribution(chain_dbm)) <= 1e-12

    def test_assignment_errors(self, chain_dbm):
        with pytest.raises(PreconditionError):
            dbm_to_lps(chain_dbm, EdgeToNodeAssignment({"b12": "n3"}))
        with pytest.raises(PreconditionError):
            dbm_to_lps(chain_dbm, EdgeToNodeAssignment({"b23": "n2"}))

    def test_node_with_two_visible_edges(self, small_lps):
        with pytest.raises(PreconditionError):
            dbm_to_lps(DecoheredBM(BornMachine(small_lps.net)))

    def test_dual_form_gets_padded_lps_nodes(self, small_ugm):
        fdbm = ugm_to_fdbm(small_ugm, PhaseAssignment.random(small_ugm, np.random.default_rng(5)))
        lps = dbm_to_lps(fdbm)
        g = lps.net.graph
        pads = [e for e in g.visible_order if e.startswith("pad@")]
        assert sorted(pads) == ["pad@phi12", "pad@phi23"]
        assert all(g.dim(e) == 1 for e in pads)
        assert distribution(lps).marginalize(pads).max_abs_diff(distribution(fdbm)) <= 1e-12
        back = lps_to_dbm(lps)
        assert distribution(back).marginalize(pads).max_abs_diff(distribution(fdbm)) <= 1e-12
