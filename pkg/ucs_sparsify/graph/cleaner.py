import logging
from typing import NamedTuple, Optional

from .edge_list_parser import EdgeListFile, RawEdge
from .model import Edge, Graph

logger = logging.getLogger(__name__)


class CleanedGraph(NamedTuple):
    graph: Graph
    duplicates_merged: int
    self_loops_dropped: int


class EdgeListCleaner:
    """
    Turns a parsed edge list into a simple graph. SNAP files list both directions
    of an undirected edge and occasionally self-loops, so the cleaner

    - drops self-loops (their vertex is kept),
    - merges repeated undirected pairs, keeping the first weight seen,
    - re-indexes vertices to 0..|V|-1 in increasing order of their original id.

    Edges keep the order of their first appearance in the file.
    """

    def __init__(self, parsed: EdgeListFile, source: Optional[str] = None):
        self.parsed = parsed
        self.source = source or "<stream>"
        self.duplicates_merged = 0
        self.self_loops_dropped = 0

    def _keep(self, edge: RawEdge, seen: dict[frozenset[int], int]) -> bool:
        if edge.u == edge.v:
            self.self_loops_dropped += 1
            logger.debug(f"{self.source}: dropped self-loop on vertex {edge.u} (line {edge.line})")
            return False
        key = frozenset((edge.u, edge.v))
        if key in seen:
            self.duplicates_merged += 1
            logger.debug(
                f"{self.source}: merged duplicate edge {edge.u}-{edge.v} on line {edge.line} "
                f"into line {seen[key]}"
            )
            return False
        seen[key] = edge.line
        return True

    def build(self) -> CleanedGraph:
        """Applies all fixes and returns the cleaned graph with its counters."""
        seen: dict[frozenset[int], int] = {}
        kept = [edge for edge in self.parsed.edges if self._keep(edge, seen)]

        original_ids = sorted({x for edge in self.parsed.edges for x in (edge.u, edge.v)})
        index = {original: k for k, original in enumerate(original_ids)}

        edges = []
        for edge in kept:
            u, v = index[edge.u], index[edge.v]
            edges.append(Edge(min(u, v), max(u, v), edge.weight))

        if self.duplicates_merged or self.self_loops_dropped:
            logger.warning(
                f"{self.source}: merged {self.duplicates_merged} duplicate edge(s), "
                f"dropped {self.self_loops_dropped} self-loop(s)"
            )

        graph = Graph(
            vertex_count=len(original_ids),
            edges=tuple(edges),
            original_ids=tuple(original_ids),
        )
        return CleanedGraph(graph, self.duplicates_merged, self.self_loops_dropped)
