import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import graph_from, weighted_graphs
from errors import InputError
from graph_space import GraphSpace, WeightedGraph, build_graph, from_networkx, to_networkx


class TestBuildGraph:
    def test_four_node_example(self, four_node_graph):
        g = four_node_graph
        assert g.labels == ("a", "b", "c", "d")
        assert g.node_count == 4 and g.edge_count == 4
        assert g.id_of("c") == 2 and g.label_of(3) == "d"

    def test_ids_follow_first_appearance(self):
        g = build_graph([("z", "y", 1), ("x", "z", 2)])
        assert g.labels == ("z", "y", "x")

    def test_isolated_nodes_come_first(self):
        g = build_graph([("a", "b", 1)], nodes=["q", "a"])
        assert g.labels == ("q", "a", "b")
        assert g.degree(0) == 0

    def test_adjacency_is_symmetric(self, four_node_graph):
        for u, v, w in four_node_graph.edges():
            assert (u, w) in four_node_graph.adjacency[v]
            assert (v, w) in four_node_graph.adjacency[u]

    def test_edges_listed_once_ascending(self, four_node_graph):
        assert list(four_node_graph.edges()) == [(0, 1, 3.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 2.0)]

    def test_duplicate_edge(self):
        with pytest.raises(InputError, match="duplicate") as info:
            build_graph([("a", "b", 1), ("c", "d", 1), ("b", "a", 2)])
        assert info.value.line == 3

    def test_self_loop(self):
        with pytest.raises(InputError, match="self-loop") as info:
            build_graph([("a", "a", 1)])
        assert info.value.line == 1

    @pytest.mark.parametrize("weight", [0, -1, float("nan"), float("inf"), "heavy"])
    def test_bad_weight(self, weight):
        with pytest.raises(InputError):
            build_graph([("a", "b", weight)])

    @pytest.mark.parametrize("label", ["", " a", "a\tb", None])
    def test_bad_label(self, label):
        with pytest.raises(InputError):
            build_graph([(label, "b", 1)])

    def test_not_a_triple(self):
        with pytest.raises(InputError, match="triple"):
            build_graph([("a", "b")])

    def test_empty(self):
        g = build_graph([])
        assert g.node_count == 0 and g.edge_count == 0


class TestNeighborhood:
    def test_neighborhood(self, four_node_graph):
        assert four_node_graph.neighborhood(2) == {0, 1, 3}

    def test_nearest_neighbors(self, four_node_graph):
        g = four_node_graph
        assert g.nearest_neighbors(0) == {1}
        assert g.nearest_neighbors(1) == {0}
        assert g.nearest_neighbors(2) == {3}
        assert g.nearest_neighbors(3) == {2}

    def test_nearest_neighbors_tie(self):
        g = build_graph([("a", "b", 2), ("a", "c", 2), ("a", "d", 1)])
        assert g.nearest_neighbors(0) == {1, 2}

    def test_isolated(self):
        g = build_graph([], nodes=["x"])
        assert g.neighborhood(0) == frozenset()
        assert g.nearest_neighbors(0) == frozenset()

    def test_unknown_id(self, four_node_graph):
        with pytest.raises(InputError, match="9"):
            four_node_graph.neighborhood(9)
        with pytest.raises(InputError):
            four_node_graph.neighborhood(True)

    def test_unknown_label(self, four_node_graph):
        with pytest.raises(InputError, match="zz"):
            four_node_graph.id_of("zz")

    def test_provider_delegates(self, four_node_graph):
        space = GraphSpace(four_node_graph)
        assert space.size == 4
        assert space.neighborhood(2) == four_node_graph.neighborhood(2)
        assert space.nearest_neighbors(0) == {1}
        assert space.label_of(1) == "b" and space.id_of("b") == 1


class TestInducedSubgraph:
    def test_example(self, four_node_graph):
        sub = four_node_graph.induced_subgraph([0, 1, 3])
        assert sub.labels == ("a", "b", "d")
        assert list(sub.edges()) == [(0, 1, 3.0)]

    def test_order_of_input_does_not_matter(self, four_node_graph):
        assert four_node_graph.induced_subgraph([3, 0, 1, 0]) == four_node_graph.induced_subgraph([0, 1, 3])

    def test_empty(self, four_node_graph):
        sub = four_node_graph.induced_subgraph([])
        assert sub.node_count == 0 and sub.edge_count == 0

    def test_unknown_id(self, four_node_graph):
        with pytest.raises(InputError):
            four_node_graph.induced_subgraph([0, 4])


@settings(max_examples=50, deadline=None)
@given(weighted_graphs())
def test_induced_subgraph_is_idempotent(instance):
    labels, edges = instance
    g = graph_from(labels, edges)
    keep = list(range(0, g.node_count, 2))
    once = g.induced_subgraph(keep)
    assert once.induced_subgraph(range(once.node_count)) == once


@settings(max_examples=50, deadline=None)
@given(weighted_graphs())
def test_whole_vertex_set_gives_back_the_graph(instance):
    labels, edges = instance
    g = graph_from(labels, edges)
    whole = g.induced_subgraph(range(g.node_count))
    assert whole.labels == g.labels
    assert list(whole.edges()) == list(g.edges())


@settings(max_examples=50, deadline=None)
@given(weighted_graphs())
def test_networkx_round_trip(instance):
    labels, edges = instance
    g = graph_from(labels, edges)
    back = from_networkx(to_networkx(g))
    assert back.labels == g.labels
    assert sorted(back.edges()) == sorted(g.edges())


class TestLesMiserables:
    def test_size(self, lesmis):
        assert lesmis.node_count == 77
        assert lesmis.edge_count == 254

    def test_degree_sum(self, lesmis):
        assert sum(lesmis.degrees()) == 508

    def test_weight_range(self, lesmis):
        assert min(lesmis.weights()) == 1
        assert max(lesmis.weights()) == 31

    def test_neighborhoods_match_networkx_degrees(self, lesmis):
        reference = nx.les_miserables_graph()
        for o, label in enumerate(lesmis.labels):
            assert len(lesmis.neighborhood(o)) == reference.degree(label)


def test_directed_graphs_are_rejected():
    with pytest.raises(InputError, match="directed"):
        from_networkx(nx.DiGraph([(1, 2)]))


def test_graph_is_immutable(four_node_graph):
    with pytest.raises(AttributeError):
        four_node_graph.labels = ("x",)
    assert isinstance(four_node_graph, WeightedGraph)
