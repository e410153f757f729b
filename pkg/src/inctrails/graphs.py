"""Graphs, edge orderings and random generators.

Vertices are dense integers ``0..n-1``.  Edges are stored once as ``(u, v)``
pairs with ``u < v``; the position of an edge in that array is its edge index,
and every labeling is an array indexed by edge index.  Adjacency is kept in CSR
form with the edge index alongside each neighbor.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import seeding
from .seeding import SeedLike, as_seed

__all__ = [
    "Graph",
    "EdgeOrdering",
    "OrderedGraph",
    "GraphError",
    "BudgetExceededError",
    "gen_gnp",
    "gen_gnm",
    "gen_complete",
    "gen_dary_tree",
    "gen_cycle",
    "gen_path",
    "gen_star",
    "random_ordering",
    "random_ordered",
    "from_edge_list",
    "tree_edge_count",
    "ordering_from_reals",
    "pair_count",
]

DEFAULT_TREE_EDGE_BUDGET = 10_000_000


class GraphError(ValueError):
    """Structural violation in a graph or labeling."""


class BudgetExceededError(RuntimeError):
    """A materialization or search would exceed its configured budget."""


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Simple undirected graph with an edge-indexed CSR adjacency.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : array-like of shape (m, 2)
        Vertex pairs.  Pairs are normalized to ``(min, max)``; order of the
        rows is preserved and defines the edge indices.
    check : bool
        Reject self-loops, duplicates and out-of-range endpoints.  Internal
        callers that build from already-valid edge sets pass ``False``.
    """

    __slots__ = ("n", "edges", "indptr", "adj_vertex", "adj_edge", "_degree")

    def __init__(self, n: int, edges=(), *, check: bool = True):
        n = int(n)
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        e = np.asarray(edges, dtype=np.int64)
        if e.size == 0:
            e = np.zeros((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphError(f"edges must have shape (m, 2), got {e.shape}")
        e = np.sort(e, axis=1)
        if check and len(e):
            if e.min() < 0 or e.max() >= n:
                raise GraphError(f"edge endpoint outside [0, {n})")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphError("self-loops are not allowed")
            keys = e[:, 0] * n + e[:, 1]
            if len(np.unique(keys)) != len(keys):
                raise GraphError("duplicate edges are not allowed")
        self.n = n
        self.edges = _frozen(np.ascontiguousarray(e))
        m = len(e)
        ends = np.concatenate([e[:, 0], e[:, 1]])
        others = np.concatenate([e[:, 1], e[:, 0]])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.argsort(ends, kind="stable")
        deg = np.bincount(ends, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        self.indptr = _frozen(indptr)
        self.adj_vertex = _frozen(np.ascontiguousarray(others[order]))
        self.adj_edge = _frozen(np.ascontiguousarray(eids[order]))
        self._degree = _frozen(deg)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degree(self) -> np.ndarray:
        return self._degree

    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """``(neighbor, edge_index)`` pairs incident to ``v``."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.adj_vertex[lo:hi].tolist(), self.adj_edge[lo:hi].tolist()))

    def edge_index(self, u: int, v: int) -> int:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        hits = np.nonzero(self.adj_vertex[lo:hi] == v)[0]
        if len(hits) == 0:
            raise KeyError((u, v))
        return int(self.adj_edge[lo + hits[0]])

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return bool(np.any(self.adj_vertex[lo:hi] == v))

    def edge_subgraph(self, edge_ids) -> "Graph":
        """Subgraph on the same vertex set keeping the given edges (in that order)."""
        ids = np.asarray(edge_ids, dtype=np.int64)
        return Graph(self.n, self.edges[ids], check=False)

    def induced(self, vertices) -> tuple["Graph", np.ndarray, np.ndarray]:
        """Induced subgraph on ``vertices``, relabeled to ``0..h-1``.

        Returns the subgraph, the original id of each new vertex, and the
        original index of each new edge.
        """
        keep = np.zeros(self.n, dtype=bool)
        keep[np.asarray(vertices, dtype=np.int64)] = True
        vertex_ids = np.nonzero(keep)[0]
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[vertex_ids] = np.arange(len(vertex_ids))
        emask = keep[self.edges[:, 0]] & keep[self.edges[:, 1]]
        edge_ids = np.nonzero(emask)[0]
        sub = Graph(len(vertex_ids), new_id[self.edges[edge_ids]], check=False)
        return sub, vertex_ids, edge_ids

    def audit(self) -> None:
        """Raise :class:`GraphError` unless every structural invariant holds."""
        e = self.edges
        if len(e):
            if e.min() < 0 or e.max() >= self.n:
                raise GraphError("edge endpoint out of range")
            if np.any(e[:, 0] >= e[:, 1]):
                raise GraphError("edge not stored as (min, max) or self-loop present")
            if len(np.unique(e[:, 0] * self.n + e[:, 1])) != len(e):
                raise GraphError("duplicate edge")
        if self.indptr[-1] != 2 * self.m:
            raise GraphError("adjacency size differs from 2m")
        counts = np.bincount(self.adj_edge, minlength=self.m)
        if self.m and np.any(counts != 2):
            raise GraphError("an edge does not appear exactly twice in the adjacency")
        owner = np.repeat(np.arange(self.n), np.diff(self.indptr))
        a = np.minimum(owner, self.adj_vertex)
        b = np.maximum(owner, self.adj_vertex)
        if len(a) and (np.any(e[self.adj_edge, 0] != a) or np.any(e[self.adj_edge, 1] != b)):
            raise GraphError("adjacency entry disagrees with the edge list")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class EdgeOrdering:
    """A bijection from edge indices to ``{1, ..., m}``."""

    __slots__ = ("labels",)

    def __init__(self, labels):
        lab = np.array(labels, dtype=np.int64).reshape(-1)
        m = len(lab)
        if m and (lab.min() != 1 or lab.max() != m or len(np.unique(lab)) != m):
            raise GraphError("labels must be a permutation of 1..m")
        self.labels = _frozen(lab)

    def __len__(self) -> int:
        return len(self.labels)

    def edges_by_label(self) -> np.ndarray:
        """Edge indices sorted by increasing label."""
        order = np.empty(len(self.labels), dtype=np.int64)
        order[self.labels - 1] = np.arange(len(self.labels))
        return order

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeOrdering) and np.array_equal(self.labels, other.labels)

    def __repr__(self) -> str:
        return f"EdgeOrdering({self.labels.tolist()})"


def ordering_from_reals(x) -> EdgeOrdering:
    """Rank transform of real labels; ties go to the smaller edge index."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if np.any(np.isnan(x)):
        raise GraphError("real labels must not be NaN")
    order = np.argsort(x, kind="stable")
    labels = np.empty(len(x), dtype=np.int64)
    labels[order] = np.arange(1, len(x) + 1)
    return EdgeOrdering(labels)


class OrderedGraph:
    """A graph together with an edge labeling.

    The labeling is either an :class:`EdgeOrdering` or an array of distinct
    reals (e.g. i.i.d. uniforms).  Solvers only ever compare labels, so they
    work on ``rank``; ``values`` keeps the labels as given for reporting.
    """

    __slots__ = ("graph", "ordering", "values", "_by_label")

    def __init__(self, graph: Graph, labeling):
        if isinstance(labeling, EdgeOrdering):
            ordering = labeling
            values = labeling.labels
        else:
            values = np.asarray(labeling)
            if values.dtype.kind in "iu" and len(values) and values.min() == 1 \
                    and values.max() == len(values) and len(np.unique(values)) == len(values):
                ordering = EdgeOrdering(values)
            else:
                ordering = ordering_from_reals(values)
            values = _frozen(values.copy())
        if len(ordering) != graph.m:
            raise GraphError(f"labeling has {len(ordering)} entries but graph has {graph.m} edges")
        self.graph = graph
        self.ordering = ordering
        self.values = values
        self._by_label = _frozen(ordering.edges_by_label())

    @property
    def rank(self) -> np.ndarray:
        return self.ordering.labels

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def edges_by_label(self) -> np.ndarray:
        return self._by_label

    def __repr__(self) -> str:
        return f"OrderedGraph(n={self.n}, m={self.m})"


# --------------------------------------------------------------------------
# generators


def _decode_pairs(idx: np.ndarray) -> np.ndarray:
    """Map linear pair indices ``v(v-1)/2 + u`` (u < v) back to ``(u, v)``."""
    idx = np.asarray(idx, dtype=np.int64)
    v = ((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    # float sqrt can be off by one near perfect squares
    v -= (v * (v - 1) // 2 > idx)
    v += ((v + 1) * v // 2 <= idx)
    u = idx - v * (v - 1) // 2
    return np.stack([u, v], axis=1)


def _check_n(n: int) -> None:
    if int(n) < 1:
        raise ValueError(f"n must be at least 1, got {n}")


def gen_gnp(n: int, p: float, seed: SeedLike) -> Graph:
    """Erdős–Rényi ``G(n, p)`` via geometric skipping, O(n + m) time."""
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    total = pair_count(n)
    if p == 0.0 or total == 0:
        return Graph(n, check=False)
    if p == 1.0:
        return gen_complete(n)
    rng = as_seed(seed).child(seeding.GRAPH).generator()
    mean = total * p
    chunk = int(mean + 6.0 * math.sqrt(mean) + 64)
    parts = []
    pos = -1
    while True:
        # clip so tiny p cannot overflow the cumulative sum; a clipped gap still lands past the end
        gaps = np.minimum(rng.geometric(p, size=chunk), total + 1)
        cand = pos + np.cumsum(gaps)
        parts.append(cand[cand < total])
        if cand[-1] >= total:
            break
        pos = int(cand[-1])
    idx = np.concatenate(parts)
    return Graph(n, _decode_pairs(idx), check=False)


def gen_gnm(n: int, m: int, seed: SeedLike) -> Graph:
    """Uniformly random graph with exactly ``m`` edges."""
    _check_n(n)
    total = pair_count(n)
    if not 0 <= m <= total:
        raise ValueError(f"m must lie in [0, {total}] for n={n}, got {m}")
    rng = as_seed(seed).child(seeding.GRAPH).generator()
    idx = np.sort(rng.choice(total, size=m, replace=False))
    return Graph(n, _decode_pairs(idx), check=False)


def gen_complete(n: int) -> Graph:
    _check_n(n)
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.stack([u, v], axis=1), check=False)


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    v = np.arange(n)
    return Graph(n, np.stack([v, (v + 1) % n], axis=1))


def gen_path(length: int) -> Graph:
    """Path with ``length`` edges on vertices ``0..length``."""
    v = np.arange(length)
    return Graph(length + 1, np.stack([v, v + 1], axis=1))


def gen_star(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def tree_edge_count(D: int, k: int) -> int:
    if D == 1:
        return k
    return (D ** (k + 1) - D) // (D - 1)


def gen_dary_tree(D: int, k: int, max_edges: int = DEFAULT_TREE_EDGE_BUDGET):
    """Materialize the rooted ``D``-ary tree with ``k`` levels below the root.

    Vertices are numbered breadth first, so the root is 0 and the parent of
    vertex ``i > 0`` is ``(i - 1) // D``.  Returns ``(graph, root, level)``
    where ``level[v]`` is the depth of ``v``.
    """
    if D < 1 or k < 0:
        raise ValueError(f"need D >= 1 and k >= 0, got D={D}, k={k}")
    m = tree_edge_count(D, k)
    if m > max_edges:
        raise BudgetExceededError(
            f"T_{D}^{k} has {m} edges, above the budget of {max_edges}; "
            "use treelemma.has_increasing_root_leaf_path, which never materializes the tree")
    child = np.arange(1, m + 1, dtype=np.int64)
    graph = Graph(m + 1, np.stack([(child - 1) // D, child], axis=1), check=False)
    level = np.zeros(m + 1, dtype=np.int64)
    start, width = 1, D
    for depth in range(1, k + 1):
        level[start:start + width] = depth
        start += width
        width *= D
    return graph, 0, level


def random_ordering(graph: Graph, seed: SeedLike) -> EdgeOrdering:
    """Uniformly random bijection ``E(G) -> {1..m}``."""
    rng = as_seed(seed).child(seeding.ORDERING).generator()
    return EdgeOrdering(rng.permutation(graph.m) + 1)


def random_ordered(graph: Graph, seed: SeedLike) -> OrderedGraph:
    return OrderedGraph(graph, random_ordering(graph, seed))


def from_edge_list(n: int, pairs: Iterable[Sequence[int]], labels=None):
    """Convenience constructor: a :class:`Graph`, or an :class:`OrderedGraph` if labels given."""
    g = Graph(n, list(pairs))
    return g if labels is None else OrderedGraph(g, np.asarray(labels))
