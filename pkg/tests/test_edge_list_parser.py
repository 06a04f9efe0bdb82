import pytest
from parsy import ParseError

from ucs_sparsify.graph.edge_list_parser import EdgeListFormat, RawEdge, edge_list_parser


def test_snap_lines_and_comments():
    parsed = edge_list_parser("# FromNodeId\tToNodeId\n1\t2\n\n  3 4  # trailing\n", EdgeListFormat.SNAP)
    assert parsed.edges == [RawEdge(1, 2, 1.0, 2), RawEdge(3, 4, 1.0, 4)]
    assert parsed.format is EdgeListFormat.SNAP


def test_weighted_triples():
    parsed = edge_list_parser("1 2 0.5\n2 3 4e-1\r\n3 1 7\n", EdgeListFormat.WEIGHTED)
    assert [(e.u, e.v, e.weight) for e in parsed.edges] == [(1, 2, 0.5), (2, 3, 0.4), (3, 1, 7.0)]


def test_negative_weight_is_parsed_for_later_validation():
    parsed = edge_list_parser("1 2 -3\n", EdgeListFormat.WEIGHTED)
    assert parsed.edges[0].weight == -3.0


def test_empty_content():
    assert edge_list_parser("", EdgeListFormat.SNAP).edges == []


def test_missing_final_newline():
    assert len(edge_list_parser("1 2\n2 3", EdgeListFormat.SNAP).edges) == 2


@pytest.mark.parametrize(
    "content, fmt",
    [
        ("1\t2\n2\tx\n", EdgeListFormat.SNAP),
        ("1 2\n", EdgeListFormat.WEIGHTED),
        ("1 2 3\n", EdgeListFormat.SNAP),
        ("-1 2\n", EdgeListFormat.SNAP),
    ],
)
def test_malformed_lines_raise(content, fmt):
    with pytest.raises(ParseError):
        edge_list_parser(content, fmt)
