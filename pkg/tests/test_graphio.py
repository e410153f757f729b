import io

import numpy as np
import pytest
from hypothesis import given

from inctrails.graphio import GraphFormatError, format_graph, parse_graph, read_graph, write_graph
from inctrails.graphs import Graph, OrderedGraph

from conftest import small_graphs, small_ordered


def test_unlabeled_round_trip():
    g = parse_graph("3 2\n0 1\n1 2\n")
    assert isinstance(g, Graph)
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_labeled_file_gives_ordered_graph():
    og = parse_graph("# triangle\n3 3\n0 1 1\n1 2 2\n2 0 3\n")
    assert isinstance(og, OrderedGraph)
    assert og.rank.tolist() == [1, 2, 3]


@pytest.mark.parametrize("text, lineno", [
    ("", 1),
    ("3\n", 1),
    ("3 2\n0 1\n", 2),
    ("3 1\n0 3\n", 2),
    ("3 1\n1 1\n", 2),
    ("3 2\n0 1\n1 0\n", 3),
    ("3 2\n0 1 1\n1 2\n", 3),
    ("3 1\n0 x\n", 2),
])
def test_malformed_input_names_the_line(text, lineno):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.lineno == lineno


def test_duplicate_labels_rejected():
    with pytest.raises(GraphFormatError):
        parse_graph("3 2\n0 1 5\n1 2 5\n")


@given(small_graphs())
def test_format_parse_identity(g):
    back = parse_graph(format_graph(g))
    assert back.n == g.n and np.array_equal(back.edges, g.edges)


@given(small_ordered())
def test_ordered_format_parse_identity(og):
    back = parse_graph(format_graph(og))
    if og.m == 0:
        # with no edge lines the file cannot say whether it was labeled
        assert isinstance(back, Graph) and back.n == og.n
        return
    assert np.array_equal(back.rank, og.rank)
    assert np.array_equal(back.graph.edges, og.graph.edges)


def test_read_and_write_files(tmp_path):
    og = OrderedGraph(Graph(4, [(0, 1), (1, 2), (2, 3)]), [3, 1, 2])
    path = tmp_path / "g.txt"
    write_graph(og, path)
    assert np.array_equal(read_graph(path).rank, og.rank)
    assert read_graph(io.StringIO(path.read_text())).m == 3
