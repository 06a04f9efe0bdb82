from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from ucs_sparsify.graph.model import Graph, connected_components, incidence_system, make_graph
from ucs_sparsify.spectra import OrthonormalEdgeBasis, edge_orthonormal_basis

DATA = Path(__file__).parent / "data"


def basis_of(g: Graph) -> OrthonormalEdgeBasis:
    return edge_orthonormal_basis(incidence_system(g), connected_components(g))


def random_connected_graph(rng: np.random.Generator, vertices: int, edges: int, weighted: bool = False) -> Graph:
    """A random spanning tree plus random extra edges, all distinct."""
    order = rng.permutation(vertices)
    pairs = {
        tuple(sorted((int(order[k]), int(order[rng.integers(k)])))) for k in range(1, vertices)
    }
    while len(pairs) < edges:
        u, v = (int(x) for x in rng.choice(vertices, size=2, replace=False))
        pairs.add((min(u, v), max(u, v)))
    ordered = sorted(pairs)
    rng.shuffle(ordered)
    weights = rng.uniform(0.5, 2.0, size=len(ordered)) if weighted else np.ones(len(ordered))
    return make_graph(vertices, [(u, v, w) for (u, v), w in zip(ordered, weights)])


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def triangle() -> Graph:
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4() -> Graph:
    return make_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def k4_minus_edge() -> Graph:
    # K4 without (2, 3); edge (0, 1) joins the two degree-3 vertices.
    return make_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def two_components() -> Graph:
    return make_graph(4, [(0, 1), (2, 3)])


@pytest.fixture
def random_graph() -> Callable[..., Graph]:
    def factory(seed: int, vertices: int, edges: int, weighted: bool = False) -> Graph:
        return random_connected_graph(np.random.default_rng(seed), vertices, edges, weighted)

    return factory
