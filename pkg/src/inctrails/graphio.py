"""Plain-text graph format.

First line ``n m``, then ``m`` lines ``u v`` with an optional third integer
column holding the edge label.  Either every edge line carries a label or
none does.  Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import os
from typing import TextIO, Union

import numpy as np

from .graphs import Graph, GraphError, OrderedGraph

PathOrText = Union[str, os.PathLike, TextIO]


class GraphFormatError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GraphFormatError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def parse_graph(text: str) -> Union[Graph, OrderedGraph]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphFormatError(1, "missing header line 'n m'")
    lineno, head = rows[0]
    if len(head) != 2:
        raise GraphFormatError(lineno, "header must be 'n m'")
    n, m = _ints(head, lineno)
    if n < 0 or m < 0:
        raise GraphFormatError(lineno, "n and m must be non-negative")
    body = rows[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise GraphFormatError(where, f"header declares {m} edges but {len(body)} edge lines follow")
    width = None
    edges, labels = [], []
    seen = set()
    for lineno, tok in body:
        if len(tok) not in (2, 3):
            raise GraphFormatError(lineno, "edge line must be 'u v' or 'u v label'")
        if width is None:
            width = len(tok)
        elif len(tok) != width:
            raise GraphFormatError(lineno, "either every edge line has a label or none does")
        vals = _ints(tok, lineno)
        u, v = vals[0], vals[1]
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(lineno, f"endpoint outside [0, {n})")
        if u == v:
            raise GraphFormatError(lineno, "self-loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(lineno, f"duplicate edge {key}")
        seen.add(key)
        edges.append(key)
        if width == 3:
            labels.append(vals[2])
    g = Graph(n, edges, check=False)
    if width == 3:
        lab = np.asarray(labels, dtype=np.int64)
        if len(np.unique(lab)) != len(lab):
            raise GraphFormatError(body[0][0], "edge labels must be distinct")
        return OrderedGraph(g, lab)
    return g


def read_graph(source: PathOrText) -> Union[Graph, OrderedGraph]:
    if hasattr(source, "read"):
        return parse_graph(source.read())
    with open(source, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def format_graph(g: Union[Graph, OrderedGraph]) -> str:
    graph = g.graph if isinstance(g, OrderedGraph) else g
    lines = [f"{graph.n} {graph.m}"]
    if isinstance(g, OrderedGraph):
        for (u, v), lab in zip(graph.edges.tolist(), g.rank.tolist()):
            lines.append(f"{u} {v} {lab}")
    else:
        lines.extend(f"{u} {v}" for u, v in graph.edges.tolist())
    return "\n".join(lines) + "\n"


def write_graph(g: Union[Graph, OrderedGraph], path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
