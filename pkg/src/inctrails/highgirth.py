"""Girth utilities and extraction of a high-girth, high-minimum-degree core.

The core is obtained in two phases.  First, short cycles are destroyed one at
a time by deleting a vertex from each cycle found.  Second, starting from the
deleted vertices plus all low-degree vertices, any survivor with too many
edges into the deleted set is absorbed into it, until a fixpoint.  The
survivors induce the core.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .graphs import Graph

__all__ = [
    "girth",
    "count_short_cycles",
    "expected_short_cycles",
    "PruneConfig",
    "PruneReport",
    "Core",
    "extract_high_girth_core",
    "check_core",
    "density_scale",
]


def girth(g: Graph) -> float:
    """Length of the shortest cycle; ``math.inf`` for a forest."""
    if g.m < 3:
        return math.inf
    value = int(_kernels.girth(g.n, g.indptr, g.adj_vertex))
    return math.inf if value == 0 else value


def expected_short_cycles(n: int, k: int, p: float) -> float:
    """Expected number of cycles of length 3..k in ``G(n, p)``.

    Sums ``C(n, l) * (l-1)!/2 * p**l`` with every term evaluated in log space.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        return 0.0
    total = 0.0
    for length in range(3, min(k, n) + 1):
        log_term = (math.lgamma(n + 1) - math.lgamma(n - length + 1) - math.lgamma(length + 1)
                    + math.lgamma(length) - math.log(2.0) + length * math.log(p))
        total += math.exp(log_term)
    return total


def count_short_cycles(g: Graph, k: int) -> dict[int, int]:
    """Exact number of cycles of each length 3..k, by enumeration.

    Every cycle is grown from its smallest vertex and counted once per
    direction, so each count is halved.  Meant for small ``k``.
    """
    counts = {length: 0 for length in range(3, k + 1)}
    adj = [set() for _ in range(g.n)]
    for u, v in g.edges.tolist():
        adj[u].add(v)
        adj[v].add(u)
    for s in range(g.n):
        stack = [(s, [s])]
        while stack:
            v, walk = stack.pop()
            for w in adj[v]:
                if w == s and len(walk) >= 3:
                    counts[len(walk)] += 1
                elif w > s and w not in walk and len(walk) < k:
                    stack.append((w, walk + [w]))
    return {length: c // 2 for length, c in counts.items()}


@dataclass(frozen=True)
class PruneConfig:
    """Parameters of the core extraction.

    ``girth_target`` is the girth the core must reach (cycles shorter than it
    are destroyed).  Degrees are measured against the density scale
    ``d = n * m / C(n, 2) = 2m / (n - 1)``.  ``degree_floor`` defaults to
    ``(1 - eps) * d``; vertices at or below it start out deleted.  A survivor
    is absorbed once it has at least ``eps * d`` edges into the deleted set.
    """

    girth_target: int = 4
    eps: float = 0.1
    degree_floor: Optional[float] = None

    def __post_init__(self):
        if self.girth_target < 3:
            raise ValueError("girth_target must be at least 3")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")

    def floor_for(self, scale: float) -> float:
        if self.degree_floor is None:
            return (1.0 - self.eps) * scale
        return float(self.degree_floor)


def density_scale(g: Graph) -> float:
    """``n`` times the edge density, i.e. ``2m / (n - 1)``."""
    return 2.0 * g.m / (g.n - 1) if g.n > 1 else 0.0


@dataclass
class PruneReport:
    cycle_deleted: list = field(default_factory=list)
    low_degree: list = field(default_factory=list)
    absorbed: list = field(default_factory=list)
    rounds: int = 0
    retained_fraction: float = 1.0
    degree_floor: float = 0.0
    absorb_threshold: float = 0.0
    core_min_degree: int = 0
    core_girth: float = math.nan

    def deleted(self) -> set:
        return set(self.cycle_deleted) | set(self.low_degree) | set(self.absorbed)

    def summary(self) -> dict:
        return {
            "cycle_deleted": len(self.cycle_deleted),
            "low_degree": len(self.low_degree),
            "absorbed": len(self.absorbed),
            "rounds": self.rounds,
            "retained_fraction": self.retained_fraction,
            "core_min_degree": self.core_min_degree,
            "core_girth": _finite(self.core_girth),
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["core_girth"] = _finite(self.core_girth)
        return d


def _finite(x: float):
    """JSON-safe girth: ``None`` for unknown, ``"inf"`` for a forest."""
    if math.isnan(x):
        return None
    return "inf" if math.isinf(x) else int(x)


@dataclass
class Core:
    """Survivors of the extraction, as a vertex subset of the input graph."""

    vertices: np.ndarray
    graph: Graph
    edge_ids: np.ndarray
    report: PruneReport

    @property
    def size(self) -> int:
        return len(self.vertices)


class CorePostconditionError(AssertionError):
    pass


def check_core(core: Core, cfg: PruneConfig, source: Graph) -> float:
    """Independently confirm girth and minimum degree of an extracted core.

    Returns the core's girth; raises :class:`CorePostconditionError` on any
    violation.
    """
    h = core.graph
    if h.n == 0:
        return math.inf
    g = girth(h)
    if g < cfg.girth_target:
        raise CorePostconditionError(f"core girth {g} below target {cfg.girth_target}")
    need = core.report.degree_floor - core.report.absorb_threshold
    low = int(h.degree.min())
    if low < need:
        raise CorePostconditionError(f"core min degree {low} below {need:.6g}")
    if h.m and (h.edges.min() < 0 or h.edges.max() >= h.n):
        raise CorePostconditionError("core edge endpoint outside the core")
    if source.n and len(core.vertices) and core.vertices.max() >= source.n:
        raise CorePostconditionError("core vertex outside the source graph")
    return g


def extract_high_girth_core(g: Graph, cfg: PruneConfig, *, verify: bool = True) -> Core:
    """Delete short cycles, then absorb poorly-connected vertices; return the surviving core.

    Parameters
    ----------
    g : Graph
    cfg : PruneConfig
    verify : bool
        Re-check the girth and minimum-degree guarantees on the result with
        :func:`check_core`.

    Returns
    -------
    Core
        The induced subgraph on the survivors together with the original
        vertex and edge ids and a :class:`PruneReport`.  An empty core is a
        valid outcome for graphs that are too sparse or too cyclic.
    """
    n = g.n
    scale = density_scale(g)
    floor = cfg.floor_for(scale)
    threshold = cfg.eps * scale

    cycle_deleted = _kernels.delete_short_cycles(n, g.indptr, g.adj_vertex, cfg.girth_target)
    deleted = np.zeros(n, dtype=bool)
    deleted[cycle_deleted] = True
    low = np.nonzero((g.degree <= floor) & ~deleted)[0]
    deleted[low] = True
    # an absorption threshold of zero would swallow every vertex
    absorbed = _kernels.absorb(n, g.indptr, g.adj_vertex, deleted, max(threshold, 1e-12))

    survivors = np.nonzero(~deleted)[0]
    h, vertex_ids, edge_ids = g.induced(survivors)
    report = PruneReport(
        cycle_deleted=cycle_deleted.tolist(),
        low_degree=low.tolist(),
        absorbed=absorbed.tolist(),
        rounds=len(absorbed),
        retained_fraction=len(survivors) / n if n else 0.0,
        degree_floor=floor,
        absorb_threshold=threshold,
        core_min_degree=int(h.degree.min()) if h.n else 0,
        core_girth=math.nan,
    )
    core = Core(vertex_ids, h, edge_ids, report)
    if verify:
        report.core_girth = check_core(core, cfg, g)
    return core
