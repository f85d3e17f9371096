"""Tests for network construction, evaluation, structure queries and gauges."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tnprob.errors import (
    ContractionBudgetError,
    DimensionMismatchError,
    InvalidNetworkError,
    SchemaError,
    ShapeMismatchError,
    SingularGaugeError,
    UnknownEdgeError,
    VisibleEdgeError,
)
from tnprob.network import (
    Edge,
    GaugeTransform,
    TensorNetwork,
    TnGraph,
    apply_gauge,
    cap_visible_edges,
    components_after_removal,
    evaluate,
    evaluate_scaled,
    factor_nonneg_gauge,
    is_cut_set,
    network_from_cores,
    network_from_document,
    network_to_document,
    promote_hidden_edge,
    random_gauge,
    split_hidden_edge,
    validate,
)
from tnprob.tensor import DenseTensor


def product_of(net: TensorNetwork) -> np.ndarray:
    m, n = net.core("m").data, net.core("n").data
    return m @ n


class TestConstruction:
    def test_edges_read_off_cores(self, factorization):
        g = factorization.graph
        assert g.visible_edges == ("a", "b")
        assert g.hidden_edges == ("r",)
        assert g.edge("r").endpoints == ("m", "n")
        assert g.dim("r") == 3
        assert g.mode("n", "b") == 1
        assert factorization.visible_order == ("a", "b")

    def test_explicit_visible_order(self, factorization):
        net = network_from_cores(
            {"m": (factorization.core("m"), ["a", "r"]), "n": (factorization.core("n"), ["r", "b"])},
            visible_order=["b", "a"],
        )
        np.testing.assert_allclose(evaluate(net).data, product_of(factorization).T)

    def test_order_and_edge_count_disagree(self):
        with pytest.raises(InvalidNetworkError):
            network_from_cores({"m": (np.ones((2, 2)), ["a"])})

    def test_unknown_edge(self, factorization):
        with pytest.raises(UnknownEdgeError):
            factorization.graph.edge("nope")


class TestValidate:
    def test_valid_network(self, four_node_network):
        report = validate(four_node_network)
        assert report.ok
        assert str(report) == "network is valid"

    def test_core_shape_mismatch(self, factorization):
        broken = TensorNetwork(factorization.graph, {**factorization.cores, "m": DenseTensor(np.ones((2, 2)))})
        report = validate(broken)
        assert "shape-mismatch" in report.kinds()
        with pytest.raises(InvalidNetworkError) as info:
            evaluate(broken)
        assert info.value.report.kinds() == report.kinds()

    def test_visible_order_must_cover_visible_edges(self, factorization):
        g = factorization.graph
        graph = TnGraph(g.nodes, g.edges, g.incidence, ("a",))
        assert validate(TensorNetwork(graph, factorization.cores)).kinds() == {"visible-order"}

    def test_self_loop(self, factorization):
        g = factorization.graph
        edges = {**g.edges, "s": Edge("s", ("m", "m"), 2)}
        incidence = {**g.incidence, "m": g.incidence["m"] + ("s",)}
        graph = TnGraph(g.nodes, edges, incidence, g.visible_order)
        assert "self-loop" in validate(TensorNetwork(graph, factorization.cores)).kinds()

    def test_missing_core(self, factorization):
        net = TensorNetwork(factorization.graph, {"m": factorization.core("m")})
        assert "missing-core" in validate(net).kinds()


class TestEvaluate:
    def test_factorization_is_matrix_product(self, factorization):
        np.testing.assert_allclose(evaluate(factorization).data, product_of(factorization))

    def test_scaled_evaluation(self, four_node_network):
        plain = evaluate(four_node_network).data
        scaled, log_scale = evaluate_scaled(four_node_network)
        np.testing.assert_allclose(scaled.data * np.exp(log_scale), plain, rtol=1e-10)

    def test_result_modes_follow_visible_order(self, four_node_network):
        assert evaluate(four_node_network).shape == (2, 2, 2, 2)

    def test_budget(self, factorization):
        with pytest.raises(ContractionBudgetError):
            evaluate(factorization, budget=1)


class TestRewrites:
    def test_promote_splits_the_sum(self, factorization):
        promoted = promote_hidden_edge(factorization, "r")
        assert promoted.visible_order == ("a", "b", "Z@r")
        assert "copy@r" in promoted.nodes
        assert set(promoted.graph.hidden_edges) == {"r#0", "r#1"}
        tensor = evaluate(promoted).data
        m, n = factorization.core("m").data, factorization.core("n").data
        for z in range(3):
            np.testing.assert_allclose(tensor[:, :, z], np.outer(m[:, z], n[z, :]))
        np.testing.assert_allclose(tensor.sum(axis=2), product_of(factorization))

    def test_promote_visible_edge(self, factorization):
        with pytest.raises(VisibleEdgeError):
            promote_hidden_edge(factorization, "a")

    def test_promote_name_clash(self, factorization):
        with pytest.raises(InvalidNetworkError):
            promote_hidden_edge(factorization, "r", visible_id="a")

    def test_cap_with_ones_marginalizes(self, factorization):
        capped = cap_visible_edges(factorization, {"a": np.ones(2)})
        assert capped.visible_order == ("b",)
        assert "cap@a" in capped.nodes
        np.testing.assert_allclose(evaluate(capped).data, product_of(factorization).sum(axis=0))

    def test_cap_with_basis_vector_slices(self, factorization):
        capped = cap_visible_edges(factorization, {"b": [0.0, 1.0]}, node_prefix="fix")
        assert "fix@b" in capped.nodes
        np.testing.assert_allclose(evaluate(capped).data, product_of(factorization)[:, 1])

    def test_cap_errors(self, factorization):
        with pytest.raises(DimensionMismatchError):
            cap_visible_edges(factorization, {"a": np.ones(3)})
        with pytest.raises(VisibleEdgeError):
            cap_visible_edges(factorization, {"r": np.ones(3)})

    def test_split_hidden_edge(self, factorization):
        split = split_hidden_edge(factorization, "r")
        assert split.visible_order == ("a", "b", "r#0", "r#1")
        tensor = evaluate(split).data
        np.testing.assert_allclose(np.einsum("abii->ab", tensor), product_of(factorization))


class TestStructure:
    def test_leaf_bond_is_cut_set(self, four_node_network):
        assert is_cut_set(four_node_network.graph, ["e34"])

    def test_bond_on_cycle_is_not_cut_set(self, four_node_network):
        assert not is_cut_set(four_node_network.graph, ["e12"])
        assert not is_cut_set(four_node_network.graph, [])

    def test_two_bonds_separate_pairs(self, four_node_network):
        g = four_node_network.graph
        assert is_cut_set(g, ["e13", "e23"])
        assert components_after_removal(g, ["e13", "e23"]) == [{"1", "2"}, {"3", "4"}]

    def test_components_of_connected_graph(self, four_node_network):
        assert components_after_removal(four_node_network.graph, []) == [{"1", "2", "3", "4"}]

    def test_unknown_edge_in_cut_query(self, four_node_network):
        with pytest.raises(UnknownEdgeError):
            is_cut_set(four_node_network.graph, ["e99"])


class TestGauge:
    def test_random_gauge_leaves_tensor_unchanged(self, four_node_network, rng):
        before = evaluate(four_node_network).data
        net = four_node_network
        for edge_id in net.graph.hidden_edges:
            net = apply_gauge(net, random_gauge(rng, edge_id, net.graph.dim(edge_id)))
        np.testing.assert_allclose(evaluate(net).data, before, atol=1e-10)

    def test_gauge_changes_cores(self, factorization):
        swap = GaugeTransform("r", np.roll(np.eye(3), 1, axis=0))
        gauged = apply_gauge(factorization, swap)
        assert not gauged.core("m").allclose(factorization.core("m"))
        np.testing.assert_allclose(gauged.core("m").data, factorization.core("m").data @ swap.matrix)

    def test_visible_edge_rejected(self, factorization):
        with pytest.raises(VisibleEdgeError):
            apply_gauge(factorization, GaugeTransform("a", np.eye(2)))

    def test_dimension_mismatch(self, factorization):
        with pytest.raises(DimensionMismatchError):
            apply_gauge(factorization, GaugeTransform("r", np.eye(2)))

    def test_singular_matrix(self, factorization):
        with pytest.raises(SingularGaugeError):
            apply_gauge(factorization, GaugeTransform("r", np.ones((3, 3))))

    def test_matrix_must_be_square(self):
        with pytest.raises(ShapeMismatchError):
            GaugeTransform("r", np.ones((2, 3)))


class TestFactorNonnegGauge:
    def test_monomial(self):
        factors = factor_nonneg_gauge([[0.0, 2.0], [3.0, 0.0]])
        assert factors is not None
        np.testing.assert_array_equal(factors.permutation, [[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(factors.diagonal, np.diag([3.0, 2.0]))

    def test_inverse_with_negative_entry(self):
        assert factor_nonneg_gauge([[1.0, 1.0], [0.0, 1.0]]) is None

    def test_negative_entry(self):
        assert factor_nonneg_gauge([[-1.0, 0.0], [0.0, 1.0]]) is None

    def test_complex_entries(self):
        assert factor_nonneg_gauge(np.diag([1.0, 1j])) is None

    def test_singular(self):
        with pytest.raises(SingularGaugeError):
            factor_nonneg_gauge([[1.0, 2.0], [2.0, 4.0]])

    @given(
        permutation=st.permutations(range(4)),
        scales=st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=4, max_size=4),
    )
    def test_recovers_permutation_and_scales(self, permutation, scales):
        p = np.eye(4)[:, permutation]
        m = p @ np.diag(scales)
        factors = factor_nonneg_gauge(m)
        assert factors is not None
        np.testing.assert_array_equal(factors.permutation, p)
        np.testing.assert_allclose(factors.diagonal, np.diag(scales))


class TestDocuments:
    def test_document_round_trip(self, four_node_network):
        restored = network_from_document(network_to_document(four_node_network))
        assert restored.nodes == four_node_network.nodes
        assert restored.visible_order == four_node_network.visible_order
        for node in four_node_network.nodes:
            np.testing.assert_array_equal(restored.core(node).data, four_node_network.core(node).data)

    def test_core_that_does_not_fit_shape(self, factorization):
        doc = network_to_document(factorization)
        doc.nodes[0].shape = [4, 4]
        with pytest.raises(SchemaError):
            network_from_document(doc)
