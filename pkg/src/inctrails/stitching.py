"""Round-based construction of a long increasing trail (or path).

The labels ``1..t(a+b)`` are cut into consecutive blocks ``I_1, J_1, ...,
I_t, J_t`` with ``|I_i| = a`` and ``|J_i| = b``.  Round ``i`` looks only at
the edges labeled in ``J_i``: it prunes them to a high-girth core, finds the
core vertices ``U_i`` that start a long increasing trail inside it, and then
glues one such trail onto the current walk through a connector edge labeled
in ``I_i``.  Every ``J_i`` label exceeds every ``I_i`` label and every label
of earlier rounds, so gluing never breaks monotonicity.  A failed round leaves
the walk untouched.

In path mode every search and every ``U_i`` avoids the vertices already on
the path.  ``U_i`` is then tested lazily, only at the endpoints of connector
candidates, and its reported size is an estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Graph, OrderedGraph
from .highgirth import Core, PruneConfig, extract_high_girth_core
from .solvers import (Path, PathSearcher, SearchBudget, Trail, TrailTable, _make_walk,
                      validate_path, validate_trail)

__all__ = [
    "ScheduleConfig",
    "RoundOutcome",
    "StitchingError",
    "partition_labels",
    "find_connector",
    "run_stitching",
    "round_rows",
    "ROUND_COLUMNS",
]

ROUND_COLUMNS = ["run_id", "round", "status", "failure_stage", "gain", "core_retained",
                 "core_min_degree", "cumulative_length"]

STITCH_PRUNE = PruneConfig(girth_target=4, eps=0.5, degree_floor=0)


class StitchingError(AssertionError):
    """An internal invariant of the construction was violated."""


@dataclass(frozen=True)
class ScheduleConfig:
    """Schedule and knobs of one stitching run.

    ``a`` labels per connector block, ``b`` per growth block, ``t`` rounds.
    ``depth_target`` fixes the per-round target length ``s``; by default it is
    ``ceil((1 - eps/2) * e * d)`` with ``d`` the realized core minimum degree.
    ``swap_blocks`` gives connectors the ``b``-sized blocks and growth the
    ``a``-sized ones instead.
    """

    t: int
    a: int
    b: int
    eps: float = 0.1
    mode: str = "trail"
    search_budget: SearchBudget = SearchBudget(200_000, "best")
    depth_target: Optional[int] = None
    prune: PruneConfig = STITCH_PRUNE
    min_core_fraction: float = 0.01
    min_core_degree: int = 0
    min_reachable_fraction: float = 0.001
    min_gain: int = 1
    root_candidates: int = 16
    swap_blocks: bool = False
    verify_cores: bool = False

    def __post_init__(self):
        if self.t < 0 or self.a < 1 or self.b < 1:
            raise ValueError("need t >= 0, a >= 1, b >= 1")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.mode not in ("trail", "path"):
            raise ValueError("mode must be 'trail' or 'path'")
        if self.min_gain < 1:
            raise ValueError("min_gain must be at least 1")

    @classmethod
    def defaults(cls, n: int, m: int, **overrides) -> "ScheduleConfig":
        """``a = ceil(n ln ln n)``, ``b = ceil((n/2) sqrt(ln n))``, ``t = floor(m/(a+b))``."""
        if n < 3:
            raise ValueError("default schedule needs n >= 3")
        a = math.ceil(n * math.log(math.log(n)))
        b = math.ceil(n / 2 * math.sqrt(math.log(n)))
        a = overrides.pop("a", a)
        b = overrides.pop("b", b)
        t = overrides.pop("t", m // (a + b))
        return cls(t=t, a=a, b=b, **overrides)

    def check(self, m: int) -> None:
        if self.t * (self.a + self.b) > m:
            raise ValueError(f"t(a+b) = {self.t * (self.a + self.b)} exceeds m = {m}")

    @property
    def connector_size(self) -> int:
        return self.b if self.swap_blocks else self.a

    @property
    def growth_size(self) -> int:
        return self.a if self.swap_blocks else self.b


def partition_labels(m: int, cfg: ScheduleConfig) -> list[tuple[range, range]]:
    """Consecutive blocks ``(I_i, J_i)`` as label ranges; labels past ``t(a+b)`` are unused."""
    cfg.check(m)
    out = []
    lo = 1
    ci, gi = cfg.connector_size, cfg.growth_size
    for _ in range(cfg.t):
        conn = range(lo, lo + ci)
        grow = range(lo + ci, lo + ci + gi)
        out.append((conn, grow))
        lo += ci + gi
    return out


@dataclass
class RoundOutcome:
    index: int
    status: str = "failure"
    failure_stage: str = "none"
    gain: int = 0
    core_stats: dict = field(default_factory=dict)
    target: int = 0
    reachable: int = 0
    reachable_estimated: bool = False
    connector: Optional[int] = None

    def as_row(self, run_id, cumulative_length: int) -> dict:
        return {
            "run_id": run_id,
            "round": self.index,
            "status": self.status,
            "failure_stage": self.failure_stage,
            "gain": self.gain,
            "core_retained": self.core_stats.get("retained_fraction", 0.0),
            "core_min_degree": self.core_stats.get("core_min_degree", 0),
            "cumulative_length": cumulative_length,
        }


def find_connector(v: int, U, h_edges: Iterable[tuple[int, int, int, int]], floor_label: int):
    """Smallest-label edge ``(edge_id, u, w, label)`` at ``v`` into ``U`` with label above ``floor_label``.

    ``h_edges`` yields ``(edge_id, u, w, label)`` tuples.  Returns ``None`` if
    there is no admissible edge.
    """
    best = None
    for eid, x, y, lab in h_edges:
        if x == v:
            other = y
        elif y == v:
            other = x
        else:
            continue
        if lab <= floor_label or other not in U:
            continue
        if best is None or lab < best[3]:
            best = (eid, x, y, lab)
    return best


class _Walk:
    """The growing trail, kept in original vertex and edge ids."""

    def __init__(self, og: OrderedGraph, mode: str):
        self.og = og
        self.mode = mode
        self.vertices: list[int] = []
        self.edges: list[int] = []
        self.on_path: set[int] = set()

    @property
    def end(self) -> Optional[int]:
        return self.vertices[-1] if self.vertices else None

    @property
    def last_label(self) -> int:
        return int(self.og.rank[self.edges[-1]]) if self.edges else 0

    def extend(self, vertices: Sequence[int], edges: Sequence[int]) -> None:
        """Append a walk that starts at the current end (or anywhere if empty)."""
        if not edges:
            return
        if self.vertices and vertices[0] != self.vertices[-1]:
            raise StitchingError("appended walk does not start at the current end")
        floor = self.last_label
        for e in edges:
            lab = int(self.og.rank[e])
            if lab <= floor:
                raise StitchingError(f"label {lab} does not exceed {floor}")
            floor = lab
        new_vertices = list(vertices[1:]) if self.vertices else list(vertices)
        if self.mode == "path" and (set(new_vertices) & self.on_path
                                    or len(set(new_vertices)) != len(new_vertices)):
            raise StitchingError("path mode would repeat a vertex")
        self.vertices.extend(new_vertices)
        self.edges.extend(int(e) for e in edges)
        self.on_path.update(new_vertices)

    def result(self):
        cls = Path if self.mode == "path" else Trail
        return _make_walk(self.og, self.vertices, self.edges, cls)


@dataclass
class _RoundCore:
    core: Core
    og: OrderedGraph       # core subgraph, values = global ranks
    vertex_ids: np.ndarray  # core-local -> global vertex
    edge_ids: np.ndarray    # core-local -> global edge


def _round_core(og: OrderedGraph, block: range, cfg: ScheduleConfig,
                blocked: set[int]) -> _RoundCore:
    seq = og.edges_by_label()[block.start - 1:block.stop - 1]
    ends = og.graph.edges[seq]
    if blocked:
        mask = np.ones(og.n, dtype=bool)
        mask[list(blocked)] = False
        keep = mask[ends[:, 0]] & mask[ends[:, 1]]
        seq, ends = seq[keep], ends[keep]
    gi = Graph(og.n, ends, check=False)
    core = extract_high_girth_core(gi, cfg.prune, verify=cfg.verify_cores)
    global_edges = seq[core.edge_ids]
    core_og = OrderedGraph(core.graph, og.rank[global_edges])
    return _RoundCore(core, core_og, core.vertices, global_edges)


def _target(cfg: ScheduleConfig, min_degree: int) -> int:
    if cfg.depth_target is not None:
        return cfg.depth_target
    return max(1, math.ceil((1.0 - cfg.eps / 2.0) * math.e * min_degree))


def _connector_candidates(og: OrderedGraph, v: int, block: range, floor_label: int,
                          allowed) -> list[tuple[int, int, int]]:
    """``(label, edge, other endpoint)`` for connector-block edges at ``v``, by ascending label."""
    g = og.graph
    lo, hi = g.indptr[v], g.indptr[v + 1]
    eids = g.adj_edge[lo:hi]
    labs = og.rank[eids]
    sel = (labs >= block.start) & (labs < block.stop) & (labs > floor_label)
    out = [(int(l), int(e), int(w)) for l, e, w in zip(labs[sel], eids[sel], g.adj_vertex[lo:hi][sel])
           if allowed(int(w))]
    out.sort()
    return out


def _round_trail(og: OrderedGraph, walk: _Walk, blocks, cfg: ScheduleConfig,
                 rc: _RoundCore, outcome: RoundOutcome):
    table = TrailTable(rc.og, reverse=True)
    s = outcome.target
    qualifies = table.best >= s
    outcome.reachable = int(np.count_nonzero(qualifies))
    if outcome.reachable < cfg.min_reachable_fraction * og.n or outcome.reachable == 0:
        outcome.failure_stage = "reachable-set"
        return None
    local_of = {int(g): i for i, g in enumerate(rc.vertex_ids)}
    if walk.end is None:
        start = int(np.argmax(table.best))
        connector = None
    else:
        conn_block = blocks[0]
        U = {int(rc.vertex_ids[i]) for i in np.nonzero(qualifies)[0]}
        g = og.graph
        v = walk.end
        lo, hi = g.indptr[v], g.indptr[v + 1]
        cand = [(int(e), int(g.edges[e, 0]), int(g.edges[e, 1]), int(og.rank[e]))
                for e in g.adj_edge[lo:hi]
                if conn_block.start <= og.rank[e] < conn_block.stop]
        connector = find_connector(v, U, cand, walk.last_label)
        if connector is None:
            outcome.failure_stage = "connector"
            return None
        other = connector[2] if connector[1] == v else connector[1]
        start = local_of[other]
    w = table.witness(start)
    verts = [int(rc.vertex_ids[x]) for x in w.vertices]
    edges = [int(rc.edge_ids[e]) for e in w.edge_indices]
    if connector is not None:
        verts = [walk.end] + verts
        edges = [connector[0]] + edges
    return verts, edges


def _round_path(og: OrderedGraph, walk: _Walk, blocks, cfg: ScheduleConfig,
                rc: _RoundCore, outcome: RoundOutcome):
    s = outcome.target
    searcher = PathSearcher(rc.og)
    local_of = {int(g): i for i, g in enumerate(rc.vertex_ids)}
    outcome.reachable_estimated = True
    if walk.end is None:
        # arbitrary qualifying root: the most promising few by trail bound
        order = np.lexsort((np.arange(rc.og.n), -searcher.start_bound))[:cfg.root_candidates]
        tested = qualified = 0
        best = None
        for r in order.tolist():
            path, _, _ = searcher.search([r], budget=cfg.search_budget)
            tested += 1
            if path.length >= s:
                qualified += 1
            if best is None or path.length > best.length:
                best = path
        outcome.reachable = _estimate(qualified, tested, rc.og.n)
        if best is None or best.length < s or outcome.reachable < cfg.min_reachable_fraction * og.n:
            outcome.failure_stage = "reachable-set"
            return None
        verts = [int(rc.vertex_ids[x]) for x in best.vertices]
        edges = [int(rc.edge_ids[e]) for e in best.edge_indices]
        return verts, edges
    cand = _connector_candidates(og, walk.end, blocks[0], walk.last_label,
                                 lambda w: w in local_of and w not in walk.on_path)
    if not cand:
        outcome.failure_stage = "connector"
        return None
    tested = qualified = 0
    found = None
    for lab, e, w in cand:
        path, _, _ = searcher.search([local_of[w]], budget=cfg.search_budget)
        tested += 1
        if path.length >= s:
            qualified += 1
            found = (e, w, path)
            break
    outcome.reachable = _estimate(qualified, tested, rc.og.n)
    if found is None:
        outcome.failure_stage = "connector"
        return None
    e, w, path = found
    verts = [walk.end] + [int(rc.vertex_ids[x]) for x in path.vertices]
    edges = [e] + [int(rc.edge_ids[x]) for x in path.edge_indices]
    return verts, edges


def _estimate(qualified: int, tested: int, core_size: int) -> int:
    return round(core_size * qualified / tested) if tested else 0


def run_stitching(og: OrderedGraph, cfg: ScheduleConfig):
    """Run all rounds; returns ``(trail_or_path, [RoundOutcome, ...])``.

    The result is re-certified with the independent validator before it is
    returned, and its length always equals the sum of the round gains.
    """
    blocks = partition_labels(og.m, cfg)
    walk = _Walk(og, cfg.mode)
    outcomes = []
    for i, (conn, grow) in enumerate(blocks, start=1):
        outcome = RoundOutcome(index=i)
        outcomes.append(outcome)
        blocked = walk.on_path if cfg.mode == "path" else set()
        rc = _round_core(og, grow, cfg, blocked)
        report = rc.core.report
        outcome.core_stats = report.summary()
        if (report.retained_fraction < cfg.min_core_fraction
                or rc.og.n == 0 or report.core_min_degree < cfg.min_core_degree):
            outcome.failure_stage = "core"
            continue
        outcome.target = _target(cfg, report.core_min_degree)
        step = (_round_trail if cfg.mode == "trail" else _round_path)(og, walk, (conn, grow), cfg, rc, outcome)
        if step is None:
            continue
        verts, edges = step
        if len(edges) < cfg.min_gain:
            outcome.failure_stage = "reachable-set"
            continue
        if walk.edges and int(og.rank[edges[0]]) >= grow.start:
            raise StitchingError("connector label outside the connector block")
        before = len(walk.edges)
        walk.extend(verts, edges)
        outcome.gain = len(walk.edges) - before
        outcome.status = "success"
        outcome.connector = edges[0] if before else None

    result = walk.result()
    verdict = validate_path(og, result) if cfg.mode == "path" else validate_trail(og, result)
    if not verdict:
        raise StitchingError(f"output failed validation: {verdict.reason} at {verdict.position}")
    if result.length != sum(o.gain for o in outcomes):
        raise StitchingError("length differs from the sum of round gains")
    return result, outcomes


def round_rows(run_id, outcomes: Sequence[RoundOutcome]) -> list[dict]:
    rows = []
    total = 0
    for o in outcomes:
        total += o.gain
        rows.append(o.as_row(run_id, total))
    return rows
