import logging
from typing import Optional, Sequence

from ..errors import SpanningStructureError
from ..graph.model import Graph, connected_components, incidence_system
from ..spectra import edge_orthonormal_basis
from .selection import sparsify_basis

logger = logging.getLogger(__name__)


class _DisjointSets:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merges the sets of a and b; False if they were already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def drop_cycle_edges(g: Graph, ordered: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Scans edges in selection order and drops each one that closes a cycle.

    An edge closing a cycle is the latest-selected edge of that cycle. Returns
    (kept, dropped), both in selection order.
    """
    sets = _DisjointSets(g.vertex_count)
    kept, dropped = [], []
    for index in ordered:
        edge = g.edges[index]
        (kept if sets.union(edge.u, edge.v) else dropped).append(index)
    return tuple(kept), tuple(dropped)


def spanning_structure(g: Graph, threads: int = 1, rank_tol: Optional[float] = None) -> tuple[int, ...]:
    """
    A spanning forest of ``g`` (|V| - r edges) extracted from a greedy selection of
    n + 1 edges by removing the single edge of the cycle that selection contains.

    When m = n + 1 no greedy budget exists and every edge is taken; a graph that is
    already a forest is returned unchanged.
    """
    labeling = connected_components(g)
    n = g.vertex_count - labeling.count
    m = g.edge_count

    if m <= n:
        logger.info(f"Graph is already a forest ({m} edges on rank {n}).")
        return tuple(range(m))
    if m == n + 1:
        logger.info("m = n + 1: taking every edge and removing one cycle edge.")
        ordered: Sequence[int] = range(m)
    else:
        basis = edge_orthonormal_basis(incidence_system(g), labeling, rank_tol)
        ordered = sparsify_basis(basis, n + 1, threads=threads).selected_edges

    kept, dropped = drop_cycle_edges(g, ordered)
    if len(dropped) != 1 or len(kept) != n:
        raise SpanningStructureError(
            f"Expected {n + 1} selected edges to contain exactly one cycle; "
            f"found {len(dropped)} cycle edge(s) and {len(kept)} forest edge(s)."
        )
    logger.info(f"Spanning structure: {len(kept)} edges, removed edge {dropped[0]}.")
    return kept
