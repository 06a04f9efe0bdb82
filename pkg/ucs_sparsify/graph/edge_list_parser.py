from enum import Enum
from typing import List, NamedTuple, Optional

from parsy import Parser, eof, regex, seq, success


class EdgeListFormat(str, Enum):
    SNAP = "snap"
    WEIGHTED = "weighted"


# --- NamedTuple Definitions for Parsed Data ---
class RawEdge(NamedTuple):
    """One edge line exactly as written, before any cleaning."""
    u: int
    v: int
    weight: float
    line: int  # 1-based


class EdgeListFile(NamedTuple):
    format: EdgeListFormat
    edges: List[RawEdge]
    original_content: Optional[str] = None


# --- 1. Base Definitions ---

# Horizontal whitespace only; newlines delimit records.
hspace = regex(r"[ \t]+")
opt_hspace = regex(r"[ \t]*")
newline = regex(r"\r?\n")

# SNAP comments run from '#' to the end of the line.
comment = regex(r"#[^\r\n]*")

# --- 2. Atomic Tokens ---

vertex_id = regex(r"[0-9]+").map(int).desc("vertex id")

# Signed on purpose: a negative weight is a validation error, not a parse error.
weight = regex(r"[-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?").map(float).desc("weight")

# --- 3. Record Parsers ---

snap_pair = seq(vertex_id << hspace, vertex_id)
weighted_triple = seq(vertex_id << hspace, vertex_id << hspace, weight)


def _edge_line(record: Parser, weighted: bool) -> Parser:
    def build(start, fields, _end) -> RawEdge:
        u, v, *rest = fields
        return RawEdge(u=u, v=v, weight=rest[0] if weighted else 1.0, line=start[0] + 1)

    return record.mark().combine(build)


def _file_parser(edge_line: Parser) -> Parser:
    # A line is a comment, an edge, or blank; trailing comments are allowed after an edge.
    line = opt_hspace >> (comment.result(None) | edge_line | success(None)) << opt_hspace << comment.optional()
    return line.sep_by(newline) << eof


_PARSERS = {
    EdgeListFormat.SNAP: _file_parser(_edge_line(snap_pair, weighted=False)),
    EdgeListFormat.WEIGHTED: _file_parser(_edge_line(weighted_triple, weighted=True)),
}


def edge_list_parser(content: str, fmt: EdgeListFormat) -> EdgeListFile:
    """
    Parses the full content of an edge-list file and returns an EdgeListFile object
    that includes the original content.

    Raises:
        parsy.ParseError: on the first malformed line.
    """
    lines = _PARSERS[EdgeListFormat(fmt)].parse(content)
    return EdgeListFile(
        format=EdgeListFormat(fmt),
        edges=[edge for edge in lines if edge is not None],
        original_content=content,
    )
