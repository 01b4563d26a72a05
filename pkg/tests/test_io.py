import pytest
from hypothesis import given, settings, strategies as st

from hostcolor.graph import Coloring, Graph
from hostcolor.io import (ParseError, format_coloring, format_graph, parse_coloring, parse_graph,
                          read_coloring, read_graph, write_coloring, write_graph)


def test_graph_format_is_sorted_and_one_indexed():
    G = Graph(4, [(3, 4), (2, 1), (1, 3)])
    assert format_graph(G) == "p edge 4 3\ne 1 2\ne 1 3\ne 3 4\n"


def test_graph_roundtrip_bit_exact(tmp_path):
    G = Graph.cycle(7)
    write_graph(G, tmp_path / "g.graph")
    text = (tmp_path / "g.graph").read_text()
    H = read_graph(tmp_path / "g.graph")
    assert H == G
    write_graph(H, tmp_path / "h.graph")
    assert (tmp_path / "h.graph").read_text() == text


def test_coloring_roundtrip(tmp_path):
    C = Coloring(3, [1, 0, 3, 2])
    write_coloring(C, tmp_path / "c.coloring")
    assert (tmp_path / "c.coloring").read_text() == "1 1\n2 0\n3 3\n4 2\n"
    assert read_coloring(tmp_path / "c.coloring", n=4, k=3) == C


@pytest.mark.parametrize("text", [
    "e 1 2\n",
    "p edge 3 1\ne 1 4\n",
    "p edge 3 2\ne 1 2\n",
    "p edge 3 1\ne 1 1\n",
    "p edge x 1\n",
    "q 1 2\n",
])
def test_graph_parse_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_coloring_parse_errors():
    with pytest.raises(ParseError):
        parse_coloring("1 1\n3 2\n")
    with pytest.raises(ParseError):
        parse_coloring("1 4\n", k=3)
    with pytest.raises(ParseError):
        parse_coloring("1 1\n", n=2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda e: e[0] < e[1])))))
def test_parse_inverts_format(data):
    n, edges = data
    G = Graph(n, sorted(edges))
    assert parse_graph(format_graph(G)) == G
