import pytest

from ucs_sparsify.graph.model import Graph, connected_components, make_graph
from ucs_sparsify.ucs.spanning import drop_cycle_edges, spanning_structure


def assert_spanning_forest(g: Graph, kept: tuple[int, ...]) -> None:
    forest = g.edge_subgraph(kept)
    components = connected_components(g)
    assert len(kept) == g.vertex_count - components.count
    assert len(set(kept)) == len(kept)
    # Same partition with |V| - r edges means acyclic.
    assert connected_components(forest) == components


def test_drop_cycle_edges_removes_latest_cycle_edge(triangle):
    assert drop_cycle_edges(triangle, [2, 0, 1]) == ((2, 0), (1,))


def test_k4_spanning_tree(k4):
    kept = spanning_structure(k4)
    assert len(kept) == 3
    assert_spanning_forest(k4, kept)


def test_triangle_takes_all_edges_then_drops_one(triangle):
    kept = spanning_structure(triangle)
    assert kept == (0, 1)
    assert_spanning_forest(triangle, kept)


def test_two_components_give_two_trees():
    g = make_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    kept = spanning_structure(g)
    assert len(kept) == 4
    assert_spanning_forest(g, kept)


def test_forest_is_returned_unchanged(two_components):
    assert spanning_structure(two_components) == (0, 1)


@pytest.mark.parametrize("seed", range(5))
def test_random_graph_spanning_tree(random_graph, seed):
    g = random_graph(seed=seed, vertices=12, edges=30, weighted=bool(seed % 2))
    kept = spanning_structure(g, threads=2)
    assert_spanning_forest(g, kept)


@pytest.mark.slow
def test_desk_scale_spanning_tree(random_graph):
    g = random_graph(seed=733, vertices=493, edges=1189)
    kept = spanning_structure(g)
    assert len(kept) == 492
    assert_spanning_forest(g, kept)
