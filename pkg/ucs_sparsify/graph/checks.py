import math
from typing import Any, NamedTuple, Optional

from returns.result import Failure, Result, Success

from .edge_list_parser import EdgeListFile
from .model import Graph


class GraphFailure(NamedTuple):
    """Base for detailed ingestion failures."""
    source: str
    message: str
    line: Optional[int] = None
    col: Optional[int] = None

    @property
    def error_type(self) -> str:
        return self.__class__.__name__

    def describe(self) -> str:
        where = f"{self.source}:{self.line}" if self.line is not None else self.source
        return f"{where}: {self.error_type}: {self.message}"


class EmptyInputFailure(GraphFailure): ...
class EncodingFailure(GraphFailure): ...
class ParseFailure(GraphFailure): ...
class NonPositiveWeightFailure(GraphFailure): ...
class GraphInvariantFailure(GraphFailure): ...
class SubsetFailure(GraphFailure): ...
class UnexpectedFailure(GraphFailure): ...


# On success a check hands its input on unchanged so checks chain with ``bind``.
GraphResult = Result[Any, GraphFailure]


def check_positive_weights(parsed: EdgeListFile, source: str) -> Result[EdgeListFile, GraphFailure]:
    """Every weight must be finite and strictly positive."""
    for edge in parsed.edges:
        if not (math.isfinite(edge.weight) and edge.weight > 0):
            return Failure(NonPositiveWeightFailure(
                source=source,
                message=f"Edge {edge.u}-{edge.v} has weight {edge.weight!r}; weights must be positive.",
                line=edge.line,
            ))
    return Success(parsed)


def check_simple_graph(graph: Graph, source: str) -> Result[Graph, GraphFailure]:
    """No self-loops, no repeated undirected pair, u < v, ids in range, positive weights."""
    seen: set[tuple[int, int]] = set()
    for index, edge in enumerate(graph.edges):
        problem = None
        if not (0 <= edge.u < graph.vertex_count and 0 <= edge.v < graph.vertex_count):
            problem = f"endpoint outside [0, {graph.vertex_count})"
        elif edge.u == edge.v:
            problem = "self-loop"
        elif edge.u > edge.v:
            problem = "edge not oriented u < v"
        elif (edge.u, edge.v) in seen:
            problem = "duplicate undirected edge"
        elif not (math.isfinite(edge.weight) and edge.weight > 0):
            problem = f"non-positive weight {edge.weight!r}"
        if problem:
            return Failure(GraphInvariantFailure(
                source=source, message=f"Edge {index} ({edge.u}, {edge.v}): {problem}.",
            ))
        seen.add((edge.u, edge.v))

    if graph.original_ids and len(graph.original_ids) != graph.vertex_count:
        return Failure(GraphInvariantFailure(
            source=source,
            message=f"{len(graph.original_ids)} original ids for {graph.vertex_count} vertices.",
        ))
    return Success(graph)


def check_subset_content(data: Any, source: str) -> Result[list, GraphFailure]:
    """A subset file is a JSON list of [u, v] pairs or an object holding one under 'selected_edges'."""
    if isinstance(data, dict):
        data = data.get("selected_edges")
    if not isinstance(data, list):
        return Failure(SubsetFailure(
            source=source,
            message="Expected a list of [u, v] pairs or an object with a 'selected_edges' list.",
        ))
    for position, item in enumerate(data):
        if not (isinstance(item, (list, tuple)) and len(item) >= 2
                and all(isinstance(x, int) and not isinstance(x, bool) for x in item[:2])):
            return Failure(SubsetFailure(
                source=source, message=f"Entry {position} is not an [u, v] pair of integers: {item!r}",
            ))
    return Success(data)
