"""Worst case over edge orderings: ``m*(G)`` for trails and ``m(G)`` for paths.

Exhaustive search walks all ``m!`` label sequences lexicographically,
partitioned by the edge that receives label 1.  Partitions are independent,
run on a thread pool (the kernels release the GIL), and can be checkpointed
to a JSON file so an interrupted run resumes where it stopped.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels, seeding
from .graphs import EdgeOrdering, Graph, pair_count
from .seeding import SeedLike, as_seed

__all__ = [
    "WorstCaseResult",
    "m_star_exhaustive",
    "m_path_exhaustive",
    "m_star_sampled_upper",
    "sampled_trail_lengths",
    "gk_bound",
    "TRAIL_EXHAUSTIVE_MAX_EDGES",
    "PATH_EXHAUSTIVE_MAX_EDGES",
]

TRAIL_EXHAUSTIVE_MAX_EDGES = 10
PATH_EXHAUSTIVE_MAX_EDGES = 9


@dataclass(frozen=True)
class WorstCaseResult:
    value: int
    witness_ordering: EdgeOrdering
    orderings_examined: int
    exhaustive: bool
    seconds: float = 0.0
    reduction: str = "none"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness_ordering": self.witness_ordering.labels.tolist(),
            "orderings_examined": self.orderings_examined,
            "exhaustive": self.exhaustive,
            "seconds": self.seconds,
            "reduction": self.reduction,
        }


def gk_bound(g: Graph) -> float:
    """Average degree ``2m/n``, a lower bound on ``m*(G)`` for every ordering."""
    if g.n < 1:
        raise ValueError("gk_bound needs at least one vertex")
    return 2.0 * g.m / g.n


def _is_complete(g: Graph) -> bool:
    return g.m == pair_count(g.n)


def _sequence_to_ordering(seq: np.ndarray) -> EdgeOrdering:
    labels = np.empty(len(seq), dtype=np.int64)
    labels[seq] = np.arange(1, len(seq) + 1)
    return EdgeOrdering(labels)


def _fingerprint(g: Graph, kind: str) -> str:
    return f"{kind}:{g.n}:" + ",".join(f"{u}-{v}" for u, v in g.edges.tolist())


def _exhaustive(g: Graph, kind: str, score: Callable[[int], tuple], *, symmetry: str,
                threads: int, checkpoint: Optional[str]) -> WorstCaseResult:
    start = time.perf_counter()
    if symmetry not in ("none", "complete"):
        raise ValueError(f"unknown symmetry reduction {symmetry!r}")
    if symmetry == "complete" and not _is_complete(g):
        raise ValueError("the 'complete' reduction needs an edge-transitive complete graph")
    if g.m == 0:
        return WorstCaseResult(0, EdgeOrdering([]), 1, True, 0.0, symmetry)
    # every edge of K_n lies in one automorphism orbit, so fixing label 1 on edge 0 suffices
    firsts = [0] if symmetry == "complete" else list(range(g.m))

    fp = _fingerprint(g, kind)
    done: dict[int, tuple[int, list, int]] = {}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            state = json.load(fh)
        if state.get("graph") == fp:
            done = {int(f): tuple(v) for f, v in state["partitions"].items()}

    def save():
        if not checkpoint:
            return
        tmp = checkpoint + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"graph": fp, "partitions": {str(f): list(v) for f, v in done.items()}}, fh)
        os.replace(tmp, checkpoint)

    todo = [f for f in firsts if f not in done]
    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for f, res in zip(todo, pool.map(score, todo)):
                done[f] = res
                save()
    else:
        for f in todo:
            done[f] = score(f)
            save()

    # deterministic reduction: smallest value, then smallest first edge
    best_first = min(firsts, key=lambda f: (done[f][0], f))
    value, seq, _ = done[best_first]
    examined = sum(done[f][2] for f in firsts)
    return WorstCaseResult(int(value), _sequence_to_ordering(np.asarray(seq)), int(examined),
                           True, time.perf_counter() - start, symmetry)


def m_star_exhaustive(g: Graph, *, symmetry: str = "none", threads: int = 1,
                      checkpoint: Optional[str] = None) -> WorstCaseResult:
    """Minimum over all ``m!`` orderings of the longest increasing trail.

    ``symmetry="complete"`` fixes label 1 on edge 0, valid only for complete
    graphs, and examines ``(m-1)!`` orderings.
    """
    if g.m > TRAIL_EXHAUSTIVE_MAX_EDGES:
        raise ValueError(f"{g.m} edges is too many for exhaustive search (limit "
                         f"{TRAIL_EXHAUSTIVE_MAX_EDGES}); use m_star_sampled_upper")
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])

    def score(first):
        best, seq, count = _kernels.min_trail_over_orderings(g.n, eu, ev, first)
        return int(best), seq.tolist(), int(count)

    return _exhaustive(g, "trail", score, symmetry=symmetry, threads=threads, checkpoint=checkpoint)


def m_path_exhaustive(g: Graph, *, symmetry: str = "none", threads: int = 1,
                      checkpoint: Optional[str] = None) -> WorstCaseResult:
    """Minimum over all orderings of the longest increasing path."""
    if g.m > PATH_EXHAUSTIVE_MAX_EDGES:
        raise ValueError(f"{g.m} edges is too many for exhaustive path search "
                         f"(limit {PATH_EXHAUSTIVE_MAX_EDGES})")
    if g.n > 63:
        raise ValueError("exhaustive path search supports at most 63 vertices")
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])

    def score(first):
        best, seq, count = _kernels.min_path_over_orderings(
            g.n, eu, ev, g.indptr, g.adj_vertex, g.adj_edge, first)
        return int(best), seq.tolist(), int(count)

    return _exhaustive(g, "path", score, symmetry=symmetry, threads=threads, checkpoint=checkpoint)


def sampled_trail_lengths(g: Graph, trials: int, seed: SeedLike, batch: int = 4096) -> np.ndarray:
    """Longest-increasing-trail length under ``trials`` independent uniform orderings."""
    rng = as_seed(seed).child(seeding.SAMPLING).generator()
    eu = np.ascontiguousarray(g.edges[:, 0])
    ev = np.ascontiguousarray(g.edges[:, 1])
    out = np.empty(trials, dtype=np.int64)
    base = np.arange(g.m, dtype=np.int64)
    for lo in range(0, trials, batch):
        b = min(batch, trials - lo)
        seqs = rng.permuted(np.broadcast_to(base, (b, g.m)), axis=1)
        out[lo:lo + b] = _kernels.batch_trail_lengths(g.n, eu, ev, np.ascontiguousarray(seqs))
    return out


def m_star_sampled_upper(g: Graph, trials: int, seed: SeedLike) -> int:
    """Smallest trail length seen over sampled orderings: an upper bound on ``m*(G)``, never exact."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if g.m == 0:
        return 0
    return int(sampled_trail_lengths(g, trials, seed).min())


def ceil_gk(g: Graph) -> int:
    return math.ceil(gk_bound(g) - 1e-12)
