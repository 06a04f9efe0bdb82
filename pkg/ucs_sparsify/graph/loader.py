import json
import logging
from pathlib import Path
from typing import Any

import aiofiles
from parsy import ParseError, line_info_at
from returns.result import Failure, Result, Success

from .checks import (
    EmptyInputFailure,
    EncodingFailure,
    GraphFailure,
    ParseFailure,
    SubsetFailure,
    UnexpectedFailure,
    check_positive_weights,
    check_simple_graph,
    check_subset_content,
)
from .cleaner import CleanedGraph, EdgeListCleaner
from .edge_list_parser import EdgeListFormat, edge_list_parser
from .model import Graph

logger = logging.getLogger(__name__)


def _decode(data: bytes | str, source: str) -> Result[str, GraphFailure]:
    if isinstance(data, str):
        return Success(data)
    try:
        return Success(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        return Failure(EncodingFailure(source=source, message=f"Input is not valid UTF-8: {e.reason}"))


def _parse(content: str, fmt: EdgeListFormat, source: str) -> Result[CleanedGraph, GraphFailure]:
    try:
        parsed = edge_list_parser(content, fmt)
    except ParseError as e:
        line, col = line_info_at(content, e.index)
        msg = f"Line {line + 1}, Col {col + 1}: Expected {', '.join(sorted(e.expected))}."
        return Failure(ParseFailure(source=source, message=msg, line=line + 1, col=col + 1))

    return (
        check_positive_weights(parsed, source)
        .map(lambda checked: EdgeListCleaner(checked, source).build())
        .bind(lambda cleaned: check_simple_graph(cleaned.graph, source).map(lambda _: cleaned))
    )


def parse_edge_list(
    data: bytes | str, fmt: EdgeListFormat = EdgeListFormat.SNAP, source: str = "<stream>"
) -> Result[CleanedGraph, GraphFailure]:
    """
    Parses an edge-list byte stream into a simple graph.

    Returns a Success holding the graph and its merge/drop counters, or a Failure
    describing the first malformed line or invalid weight.
    """
    return _decode(data, source).bind(lambda content: _parse(content, EdgeListFormat(fmt), source))


async def load_graph(path: Path, fmt: EdgeListFormat) -> Result[CleanedGraph, GraphFailure]:
    """Reads and parses a graph file asynchronously."""
    logger.debug(f"Reading: {path}")
    try:
        async with aiofiles.open(path, "rb") as f:
            data = await f.read()
    except OSError as e:
        return Failure(UnexpectedFailure(source=str(path), message=str(e)))

    result = parse_edge_list(data, fmt, source=path.name)
    match result:
        case Success(CleanedGraph(graph=graph)):
            logger.info(
                f"Loaded {path.name}: {graph.vertex_count} vertices, {graph.edge_count} edges"
            )
        case Failure(failure):
            logger.debug(f"FAILED: {failure.describe()}")
    return result


def resolve_subset(graph: Graph, pairs: list, source: str) -> Result[tuple[int, ...], GraphFailure]:
    """Maps [u, v] pairs given in original vertex ids to edge indices of ``graph``."""
    lookup: dict[frozenset[int], int] = {
        frozenset(graph.original_edge(index)): index for index in range(graph.edge_count)
    }
    indices = []
    for pair in pairs:
        key = frozenset((int(pair[0]), int(pair[1])))
        if key not in lookup:
            return Failure(SubsetFailure(
                source=source, message=f"Edge {pair[0]}-{pair[1]} is not an edge of the input graph.",
            ))
        indices.append(lookup[key])
    if len(set(indices)) != len(indices):
        return Failure(SubsetFailure(source=source, message="Subset lists an edge more than once."))
    return Success(tuple(indices))


def parse_subset(data: Any, graph: Graph, source: str = "<subset>") -> Result[tuple[int, ...], GraphFailure]:
    return check_subset_content(data, source).bind(lambda pairs: resolve_subset(graph, pairs, source))


async def load_subset(path: Path, graph: Graph) -> Result[tuple[int, ...], GraphFailure]:
    """Reads a JSON subset file (a list of [u, v] pairs or a sparsify/tree report)."""
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            content = await f.read()
        if not content.strip():
            return Failure(EmptyInputFailure(source=str(path), message="Subset file is empty."))
        data = json.loads(content)
    except (OSError, json.JSONDecodeError) as e:
        return Failure(SubsetFailure(source=str(path), message=str(e).split("\n")[0]))
    return parse_subset(data, graph, source=path.name)
