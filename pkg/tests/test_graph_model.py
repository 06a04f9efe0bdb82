import numpy as np
import pytest
from numpy.testing import assert_array_equal

from ucs_sparsify.errors import DimensionMismatchError
from ucs_sparsify.graph.model import (
    Edge,
    Graph,
    connected_components,
    format_edge_list,
    graph_from_json,
    graph_to_json,
    incidence_system,
    make_graph,
    quadratic_form,
)


def test_make_graph_orients_edges():
    g = make_graph(3, [(2, 0), (1, 2, 3.0)])
    assert g.edges == (Edge(0, 2, 1.0), Edge(1, 2, 3.0))
    assert g.original_id(2) == 2


@pytest.mark.parametrize(
    "g, count",
    [
        (make_graph(3, [(0, 1), (1, 2), (0, 2)]), 1),
        (make_graph(4, [(0, 1), (2, 3)]), 2),
        (make_graph(5, []), 5),
    ],
)
def test_component_count(g, count):
    assert connected_components(g).count == count


def test_component_labels_follow_smallest_vertex():
    g = make_graph(5, [(3, 4), (0, 2)])
    assert connected_components(g).labels == (0, 1, 0, 2, 2)


def test_empty_graph_has_no_components():
    assert connected_components(Graph(vertex_count=0, edges=())).count == 0


def test_laplacian_single_edge():
    assert_array_equal(incidence_system(make_graph(2, [(0, 1)])).L, [[1, -1], [-1, 1]])
    assert_array_equal(incidence_system(make_graph(2, [(0, 1, 3.0)])).L, [[3, -3], [-3, 3]])


def test_laplacian_triangle(triangle):
    L = incidence_system(triangle).L
    assert_array_equal(L, 3 * np.eye(3) - np.ones((3, 3)))


def test_incidence_orientation(triangle):
    B = incidence_system(triangle).B
    assert_array_equal(B, [[1, -1, 0], [0, 1, -1], [1, 0, -1]])


def test_laplacian_with_huge_integral_weight():
    L = incidence_system(make_graph(2, [(0, 1, 1e19)])).L
    assert_array_equal(L, [[1e19, -1e19], [-1e19, 1e19]])


def test_laplacian_with_weights_summing_past_int64():
    g = make_graph(3, [(0, 1, 2.0**62), (0, 2, 2.0**62)])
    L = incidence_system(g).L
    assert L[0, 0] == 2.0**63
    assert np.all(np.linalg.eigvalsh(L) >= -1e-6 * 2.0**63)


def test_incidence_arrays_are_read_only(triangle):
    sys = incidence_system(triangle)
    with pytest.raises(ValueError):
        sys.L[0, 0] = 5.0


@pytest.mark.parametrize(
    "edges, x, expected",
    [
        ([(0, 1)], [0.0, 1.0], 1.0),
        ([(0, 1), (1, 2), (0, 2)], [1.0, 0.0, 0.0], 2.0),
        ([(0, 1), (1, 2), (0, 2)], [4.0, 4.0, 4.0], 0.0),
    ],
)
def test_quadratic_form_known_values(edges, x, expected):
    g = make_graph(max(max(e) for e in edges) + 1, edges)
    assert quadratic_form(g, x) == pytest.approx(expected)


def test_quadratic_form_matches_laplacian(random_graph):
    g = random_graph(seed=3, vertices=12, edges=30, weighted=True)
    L = incidence_system(g).L
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.normal(size=g.vertex_count)
        exact = float(x @ L @ x)
        assert abs(quadratic_form(g, x) - exact) <= 1e-12 * (exact + 1)


def test_quadratic_form_rejects_wrong_shape(triangle):
    with pytest.raises(DimensionMismatchError):
        quadratic_form(triangle, [1.0, 2.0])


def test_laplacian_nullity_equals_component_count(random_graph):
    g1 = random_graph(seed=1, vertices=6, edges=9)
    g2 = random_graph(seed=2, vertices=5, edges=7)
    shifted = [(e.u + 6, e.v + 6, e.weight) for e in g2.edges]
    g = make_graph(12, list(g1.edges) + shifted)  # vertex 11 stays isolated
    values = np.linalg.eigvalsh(incidence_system(g).L)
    zero = np.sum(np.abs(values) <= 1e-8 * values.max())
    assert zero == connected_components(g).count == 3


def test_graph_json_round_trip(random_graph):
    g = random_graph(seed=5, vertices=8, edges=14, weighted=True)
    g = g._replace(original_ids=tuple(range(100, 108)))
    assert graph_from_json(graph_to_json(g)) == g


def test_format_edge_list_uses_original_ids():
    g = make_graph(2, [(0, 1, 2.5)], original_ids=[10, 42])
    assert format_edge_list(g) == "10 42 2.5\n"
    assert format_edge_list(g, weighted=False) == "10\t42\n"
    assert format_edge_list(make_graph(0, [])) == ""


def test_format_edge_list_writes_isolated_vertices_as_self_loops():
    g = make_graph(3, [(0, 2, 2.0)], original_ids=[5, 6, 9])
    assert format_edge_list(g) == "5 9 2.0\n6 6 1.0\n"
    assert format_edge_list(g, weighted=False) == "5\t9\n6\t6\n"


def test_edge_subgraph_keeps_vertices(k4):
    h = k4.edge_subgraph([5, 0])
    assert h.vertex_count == 4
    assert h.edges == (k4.edges[5], k4.edges[0])
