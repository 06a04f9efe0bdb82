"""Graph representation, connectivity and Laplacian construction."""

import json
from typing import Any, NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse import coo_array
from scipy.sparse.csgraph import connected_components as _csgraph_components

from ..errors import DimensionMismatchError


class Edge(NamedTuple):
    u: int
    v: int
    weight: float = 1.0


class Graph(NamedTuple):
    """
    An undirected, simple, positively weighted graph on vertices 0..vertex_count-1.

    Every stored edge is oriented u < v. ``original_ids[k]`` is the identifier vertex
    ``k`` carried in the input file; it defaults to ``k`` itself.
    """
    vertex_count: int
    edges: tuple[Edge, ...]
    original_ids: tuple[int, ...] = ()

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def original_id(self, vertex: int) -> int:
        return self.original_ids[vertex] if self.original_ids else vertex

    def original_edge(self, index: int) -> tuple[int, int]:
        edge = self.edges[index]
        return self.original_id(edge.u), self.original_id(edge.v)

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Returns the tail and head arrays of the edge list."""
        if not self.edges:
            return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
        pairs = np.array([(e.u, e.v) for e in self.edges], dtype=np.intp)
        return pairs[:, 0], pairs[:, 1]

    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    def edge_subgraph(self, indices: Sequence[int]) -> "Graph":
        """The graph on the same vertices keeping only ``indices`` (original weights)."""
        return self._replace(edges=tuple(self.edges[i] for i in indices))


def make_graph(
    vertex_count: int,
    edges: Sequence[tuple[int, int] | tuple[int, int, float]],
    original_ids: Optional[Sequence[int]] = None,
) -> Graph:
    """Builds a Graph from (u, v[, w]) tuples, orienting every edge u < v."""
    oriented = []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        weight = float(edge[2]) if len(edge) > 2 else 1.0
        oriented.append(Edge(min(u, v), max(u, v), weight))
    return Graph(
        vertex_count=vertex_count,
        edges=tuple(oriented),
        original_ids=tuple(original_ids) if original_ids is not None else (),
    )


class ComponentLabeling(NamedTuple):
    labels: tuple[int, ...]
    count: int


class IncidenceSystem(NamedTuple):
    """Signed incidence matrix B (m x |V|), edge weights W and Laplacian L = B^T W B."""
    B: np.ndarray
    W: np.ndarray
    L: np.ndarray

    @property
    def vertex_count(self) -> int:
        return self.B.shape[1]

    @property
    def edge_count(self) -> int:
        return self.B.shape[0]

    def weighted_incidence(self) -> np.ndarray:
        return np.sqrt(self.W)[:, None] * self.B


def connected_components(g: Graph) -> ComponentLabeling:
    """
    Labels the connected components of ``g``.

    Component ids are assigned in increasing order of the smallest vertex they contain.
    """
    if g.vertex_count == 0:
        return ComponentLabeling(labels=(), count=0)

    tails, heads = g.endpoints()
    adjacency = coo_array(
        (np.ones(len(tails)), (tails, heads)), shape=(g.vertex_count, g.vertex_count)
    ).tocsr()
    count, raw = _csgraph_components(adjacency, directed=False)

    relabel: dict[int, int] = {}
    labels = []
    for raw_label in raw:
        labels.append(relabel.setdefault(int(raw_label), len(relabel)))
    return ComponentLabeling(labels=tuple(labels), count=int(count))


def _fits_int64(W: np.ndarray, tails: np.ndarray, heads: np.ndarray, size: int) -> bool:
    """True if every entry of L = B^T W B, a sum of at most max-degree weights, stays below 2^62."""
    degree = np.bincount(np.concatenate([tails, heads]), minlength=size).max()
    return float(np.abs(W).max()) * float(degree) < 2.0**62


def incidence_system(g: Graph) -> IncidenceSystem:
    """Builds B, W and L for ``g`` with each edge oriented from u to v (u < v)."""
    m, size = g.edge_count, g.vertex_count
    B = np.zeros((m, size), dtype=np.int8)
    if m:
        tails, heads = g.endpoints()
        rows = np.arange(m)
        B[rows, tails] = 1
        B[rows, heads] = -1
    W = g.weights()

    if m and np.all(W == np.round(W)) and _fits_int64(W, tails, heads, size):
        # Integral weights: keep the product exact.
        L = (B.T.astype(np.int64) @ (W.astype(np.int64)[:, None] * B)).astype(float)
    else:
        L = B.T.astype(float) @ (W[:, None] * B)

    for array in (B, W, L):
        array.setflags(write=False)
    return IncidenceSystem(B=B, W=W, L=L)


def quadratic_form(g: Graph, x: Sequence[float] | np.ndarray) -> float:
    """Returns sum over edges of w_uv (x_u - x_v)^2, i.e. x^T L x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.vertex_count,):
        raise DimensionMismatchError(
            f"Vector of shape {x.shape} does not match a graph on {g.vertex_count} vertices."
        )
    if not g.edges:
        return 0.0
    tails, heads = g.endpoints()
    return float(np.sum(g.weights() * (x[tails] - x[heads]) ** 2))


def graph_to_json(g: Graph) -> dict[str, Any]:
    return {
        "vertex_count": g.vertex_count,
        "edges": [[e.u, e.v, e.weight] for e in g.edges],
        "original_ids": [g.original_id(k) for k in range(g.vertex_count)],
    }


def graph_from_json(data: dict[str, Any] | str) -> Graph:
    if isinstance(data, str):
        data = json.loads(data)
    return Graph(
        vertex_count=int(data["vertex_count"]),
        edges=tuple(Edge(int(u), int(v), float(w)) for u, v, w in data["edges"]),
        original_ids=tuple(int(i) for i in data.get("original_ids", ())),
    )


def format_edge_list(g: Graph, weighted: bool = True) -> str:
    """
    Serializes the edges with original vertex ids, one edge per line.

    Isolated vertices follow as self-loops ``v v``, which the loader drops while keeping
    the vertex, so parsing the text back gives the same vertex set.
    """
    lines = []
    for index, edge in enumerate(g.edges):
        u, v = g.original_edge(index)
        lines.append(f"{u} {v} {edge.weight!r}" if weighted else f"{u}\t{v}")
    covered = {x for edge in g.edges for x in (edge.u, edge.v)}
    for vertex in range(g.vertex_count):
        if vertex not in covered:
            ident = g.original_id(vertex)
            lines.append(f"{ident} {ident} 1.0" if weighted else f"{ident}\t{ident}")
    return "\n".join(lines) + ("\n" if lines else "")
