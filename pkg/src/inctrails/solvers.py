"""Longest increasing trails and paths.

``longest_increasing_trail`` is exact and runs in O(m log m): edges are swept
in label order while each vertex keeps the length of the best increasing
trail ending there.  Paths have no such shortcut, so
``longest_increasing_path_exact`` is a budgeted depth-first search pruned by
the trail bound.  The brute-force enumerators and the validators are
deliberately independent of both and serve as oracles.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .graphs import OrderedGraph

__all__ = [
    "Trail",
    "Path",
    "SearchBudget",
    "SearchBudgetExceeded",
    "Verdict",
    "TrailTable",
    "longest_increasing_trail",
    "longest_increasing_path_exact",
    "enumerate_trails_bruteforce",
    "enumerate_paths_bruteforce",
    "validate_trail",
    "validate_path",
    "sparse_probe",
    "probe_segments",
    "trail_start_bounds",
]

BRUTEFORCE_MAX_EDGES = 25


@dataclass(frozen=True)
class Trail:
    vertices: tuple[int, ...] = ()
    edge_indices: tuple[int, ...] = ()
    labels: tuple = ()

    @property
    def length(self) -> int:
        return len(self.edge_indices)

    @property
    def start(self) -> Optional[int]:
        return self.vertices[0] if self.vertices else None

    @property
    def end(self) -> Optional[int]:
        return self.vertices[-1] if self.vertices else None

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": list(self.edge_indices),
            "labels": [_plain(x) for x in self.labels],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict):
        return cls(tuple(d["vertices"]), tuple(d["edges"]), tuple(d["labels"]))


class Path(Trail):
    """A trail that repeats no vertex."""


def _plain(x):
    return x.item() if isinstance(x, np.generic) else x


def _make_walk(og: OrderedGraph, vertices: Sequence[int], edges: Sequence[int], cls=Trail):
    vertices = tuple(int(v) for v in vertices)
    edges = tuple(int(e) for e in edges)
    if not edges:
        vertices = ()
    labels = tuple(_plain(og.values[e]) for e in edges)
    return cls(vertices, edges, labels)


# --------------------------------------------------------------------------
# trail DP


class TrailTable:
    """Best increasing trails ending at (or, with ``reverse=True``, starting at) each vertex.

    One sweep of the trail DP; ``witness(v)`` reconstructs a maximum trail for
    any vertex from the stored predecessor codes.
    """

    def __init__(self, og: OrderedGraph, *, reverse: bool = False):
        self.og = og
        self.reverse = reverse
        seq = og.edges_by_label()
        if reverse:
            seq = seq[::-1]
        self._seq = np.ascontiguousarray(seq)
        edges = og.graph.edges
        self._tails = np.ascontiguousarray(edges[self._seq, 0])
        self._heads = np.ascontiguousarray(edges[self._seq, 1])
        self.best, self._last, self._pred, self._through = _kernels.trail_dp(
            og.n, self._tails, self._heads)

    def length(self, v: int) -> int:
        return int(self.best[v])

    def argmax(self) -> int:
        return int(np.argmax(self.best)) if len(self.best) else 0

    def witness(self, v: int) -> Trail:
        codes = []
        c = int(self._last[v])
        while c >= 0:
            codes.append(c)
            c = int(self._pred[c])
        codes.reverse()
        if not codes:
            return Trail()
        verts = []
        edges = []
        for c in codes:
            pos, d = divmod(c, 2)
            a, b = (self._tails[pos], self._heads[pos]) if d == 0 else (self._heads[pos], self._tails[pos])
            if not verts:
                verts.append(int(a))
            verts.append(int(b))
            edges.append(int(self._seq[pos]))
        if self.reverse:
            verts.reverse()
            edges.reverse()
        return _make_walk(self.og, verts, edges)


def longest_increasing_trail(og: OrderedGraph) -> Trail:
    """A maximum-length increasing trail (exact)."""
    if og.m == 0:
        return Trail()
    table = TrailTable(og)
    return table.witness(table.argmax())


def trail_length(og: OrderedGraph) -> int:
    if og.m == 0:
        return 0
    seq = og.edges_by_label()
    e = og.graph.edges
    return int(_kernels.trail_length(og.n, np.ascontiguousarray(e[seq, 0]),
                                     np.ascontiguousarray(e[seq, 1])))


def trail_start_bounds(og: OrderedGraph) -> np.ndarray:
    """Array ``(m, 2)``: longest increasing trail whose first edge is ``e`` leaving ``edges[e, side]``.

    An admissible upper bound for any increasing path continuing the same way.
    """
    table = TrailTable(og, reverse=True)
    out = np.zeros((og.m, 2), dtype=np.int64)
    pos_of = table._seq
    # reverse-sweep arrival at head from tail == forward start at head toward tail
    out[pos_of, 1] = table._through[0::2]
    out[pos_of, 0] = table._through[1::2]
    return out


# --------------------------------------------------------------------------
# exact path search


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, expansions: int, best: "Path"):
        super().__init__(f"search budget of {expansions} expansions exhausted "
                         f"(best path so far has length {best.length})")
        self.expansions = expansions
        self.best = best


@dataclass(frozen=True)
class SearchBudget:
    max_expansions: int = 10_000_000
    on_exhaust: str = "best"

    def __post_init__(self):
        if self.max_expansions <= 0:
            raise ValueError("max_expansions must be positive")
        if self.on_exhaust not in ("fail", "best"):
            raise ValueError("on_exhaust must be 'fail' or 'best'")


@dataclass
class _SearchState:
    best_len: int = 0
    best_vertices: list = field(default_factory=list)
    best_edges: list = field(default_factory=list)
    expansions: int = 0
    exhausted: bool = False


class PathSearcher:
    """Depth-first search for long increasing paths on one ordered graph.

    Incident edges are tried in ascending label order.  A branch is cut when
    its length plus the trail bound of the next edge cannot beat the
    incumbent.  Visited sets are Python-int bitsets for n <= 128 and hash sets
    above.
    """

    def __init__(self, og: OrderedGraph, bounds: Optional[np.ndarray] = None):
        self.og = og
        g = og.graph
        rank = og.rank
        self.bounds = trail_start_bounds(og) if bounds is None else bounds
        owner = np.repeat(np.arange(g.n), np.diff(g.indptr))
        order = np.lexsort((rank[g.adj_edge], owner))
        nbr = g.adj_vertex[order]
        eid = g.adj_edge[order]
        lab = rank[eid]
        side = (g.edges[eid, 1] == owner).astype(np.int64)
        bnd = self.bounds[eid, side]
        ptr = g.indptr
        self._inc = [
            list(zip(nbr[ptr[v]:ptr[v + 1]].tolist(), eid[ptr[v]:ptr[v + 1]].tolist(),
                     lab[ptr[v]:ptr[v + 1]].tolist(), bnd[ptr[v]:ptr[v + 1]].tolist()))
            for v in range(g.n)
        ]
        self.start_bound = np.zeros(g.n, dtype=np.int64)
        if g.m:
            np.maximum.at(self.start_bound, g.edges[:, 0], self.bounds[:, 0])
            np.maximum.at(self.start_bound, g.edges[:, 1], self.bounds[:, 1])

    def search(self, sources: Iterable[int], *, budget: SearchBudget,
               blocked=frozenset(), floor_label: int = 0, target: Optional[int] = None,
               max_length: Optional[int] = None) -> tuple[Path, bool, int]:
        """Longest increasing path starting at any of ``sources``.

        Paths avoid ``blocked`` vertices and use only labels (ranks) above
        ``floor_label``.  The search stops early once a path of length
        ``target`` is found.  Returns ``(path, exact, expansions)`` where
        ``exact`` means the search space was exhausted or the target was met.
        """
        n = self.og.n
        small = n <= 128
        cap = max_length if max_length is not None else n
        stop_at = min(target, cap) if target is not None else cap
        st = _SearchState()
        src = [int(s) for s in sources if s not in blocked]
        src.sort(key=lambda s: (-int(self.start_bound[s]), s))
        blocked_mask = 0
        if small:
            for b in blocked:
                blocked_mask |= 1 << int(b)
        inc = self._inc
        for s in src:
            if self.start_bound[s] <= st.best_len or st.best_len >= stop_at:
                break
            if small:
                seen_mask = blocked_mask | (1 << s)
            else:
                seen = set(blocked)
                seen.add(s)
            verts = [s]
            edges = []
            stack = [(iter(inc[s]), floor_label)]
            while stack:
                it, last = stack[-1]
                depth = len(edges)
                advanced = False
                for w, e, lab, bnd in it:
                    if lab <= last:
                        continue
                    if depth + bnd <= st.best_len:
                        continue
                    if small:
                        if (seen_mask >> w) & 1:
                            continue
                    elif w in seen:
                        continue
                    st.expansions += 1
                    if st.expansions > budget.max_expansions:
                        st.exhausted = True
                        break
                    verts.append(w)
                    edges.append(e)
                    if small:
                        seen_mask |= 1 << w
                    else:
                        seen.add(w)
                    if depth + 1 > st.best_len:
                        st.best_len = depth + 1
                        st.best_vertices = list(verts)
                        st.best_edges = list(edges)
                    if depth + 1 < cap and st.best_len < stop_at:
                        stack.append((iter(inc[w]), lab))
                        advanced = True
                        break
                    verts.pop()
                    edges.pop()
                    if small:
                        seen_mask &= ~(1 << w)
                    else:
                        seen.discard(w)
                    if st.best_len >= stop_at:
                        break
                if st.exhausted or st.best_len >= stop_at:
                    break
                if not advanced:
                    stack.pop()
                    if edges:
                        w = verts.pop()
                        edges.pop()
                        if small:
                            seen_mask &= ~(1 << w)
                        else:
                            seen.discard(w)
            if st.exhausted:
                break
        path = _make_walk(self.og, st.best_vertices, st.best_edges, Path)
        if st.exhausted and budget.on_exhaust == "fail":
            raise SearchBudgetExceeded(budget.max_expansions, path)
        exact = not st.exhausted
        return path, exact, st.expansions


def longest_increasing_path_exact(og: OrderedGraph, budget: SearchBudget = SearchBudget()
                                  ) -> tuple[Path, bool]:
    """Longest increasing path, exact unless the budget runs out.

    Returns ``(path, exact)``.  With ``on_exhaust='fail'`` an exhausted
    budget raises :class:`SearchBudgetExceeded` instead.
    """
    if og.m == 0:
        return Path(), True
    searcher = PathSearcher(og)
    path, exact, _ = searcher.search(range(og.n), budget=budget)
    return path, exact


# --------------------------------------------------------------------------
# brute-force oracles


def _guard(og: OrderedGraph) -> None:
    if og.m > BRUTEFORCE_MAX_EDGES:
        raise ValueError(f"brute force is limited to {BRUTEFORCE_MAX_EDGES} edges, got {og.m}")


def _bruteforce(og: OrderedGraph, simple_path: bool) -> int:
    _guard(og)
    adj = [[] for _ in range(og.n)]
    for e, (u, v) in enumerate(og.graph.edges.tolist()):
        adj[u].append((v, e))
        adj[v].append((u, e))
    rank = og.rank.tolist()
    best = 0

    def walk(v, last, used_edges, used_vertices, length):
        nonlocal best
        best = max(best, length)
        for w, e in adj[v]:
            if e in used_edges or rank[e] <= last:
                continue
            if simple_path and w in used_vertices:
                continue
            used_edges.add(e)
            used_vertices.add(w)
            walk(w, rank[e], used_edges, used_vertices, length + 1)
            used_edges.discard(e)
            if simple_path:
                used_vertices.discard(w)

    for s in range(og.n):
        walk(s, 0, set(), {s}, 0)
    return best


def enumerate_trails_bruteforce(og: OrderedGraph) -> int:
    """Maximum length over every increasing trail, by exhaustive enumeration."""
    return _bruteforce(og, simple_path=False)


def enumerate_paths_bruteforce(og: OrderedGraph) -> int:
    """Maximum length over every increasing path, by exhaustive enumeration."""
    return _bruteforce(og, simple_path=True)


# --------------------------------------------------------------------------
# validators


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = "ok"
    position: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def validate_trail(og: OrderedGraph, t: Trail) -> Verdict:
    """Certify ``t`` as an increasing trail of ``og`` using only the graph and labels."""
    verts = list(t.vertices)
    edges = list(t.edge_indices)
    if not edges:
        return Verdict(len(verts) <= 1, "ok" if len(verts) <= 1 else "length-mismatch")
    if len(verts) != len(edges) + 1:
        return Verdict(False, "length-mismatch")
    if t.labels and len(t.labels) != len(edges):
        return Verdict(False, "length-mismatch")
    g = og.graph
    seen = set()
    prev = None
    for i, e in enumerate(edges):
        if not 0 <= e < g.m:
            return Verdict(False, "not-an-edge", i)
        a, b = (int(x) for x in g.edges[e])
        if {a, b} != {verts[i], verts[i + 1]}:
            return Verdict(False, "not-incident", i)
        if e in seen:
            return Verdict(False, "repeated-edge", i)
        seen.add(e)
        r = int(og.rank[e])
        if prev is not None and r <= prev:
            return Verdict(False, "not-increasing", i)
        prev = r
        if t.labels and t.labels[i] != _plain(og.values[e]):
            return Verdict(False, "label-mismatch", i)
    return Verdict(True)


def validate_path(og: OrderedGraph, p: Trail) -> Verdict:
    verdict = validate_trail(og, p)
    if not verdict:
        return verdict
    seen = set()
    for i, v in enumerate(p.vertices):
        if v in seen:
            return Verdict(False, "repeated-vertex", i)
        seen.add(v)
    return Verdict(True)


# --------------------------------------------------------------------------
# sparse regime probe


def probe_segments(og: OrderedGraph, k: int) -> tuple[int, int]:
    """Chop a label-oblivious long path into length-``k`` pieces.

    Returns ``(increasing, total)``: how many of the ``total`` edge-disjoint
    segments are increasing in one of their two directions.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    g = og.graph
    if g.m == 0:
        return 0, 0
    path = _kernels.dfs_deepest_path(g.n, g.indptr, g.adj_vertex)
    segments = (len(path) - 1) // k
    if segments == 0:
        return 0, 0
    a = np.minimum(path[:-1], path[1:])
    b = np.maximum(path[:-1], path[1:])
    keys = g.edges[:, 0] * g.n + g.edges[:, 1]
    order = np.argsort(keys)
    eid = order[np.searchsorted(keys, a * g.n + b, sorter=order)]
    r = og.rank[eid[:segments * k]].reshape(segments, k)
    if k == 1:
        return segments, segments
    d = np.diff(r, axis=1)
    up = np.all(d > 0, axis=1)
    down = np.all(d < 0, axis=1)
    return int(np.count_nonzero(up | down)), segments


def sparse_probe(og: OrderedGraph, k: int) -> int:
    """Number of increasing length-``k`` segments on a long label-oblivious path."""
    return probe_segments(og, k)[0]
