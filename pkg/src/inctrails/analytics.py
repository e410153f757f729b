"""Closed-form first-moment quantities for increasing paths and trails in ``G(n, p)``.

Everything is evaluated through ``lgamma`` so that ``n`` in the millions is
fine.  Logs are natural throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels
from .graphs import OrderedGraph

__all__ = [
    "RegimeQuery",
    "LogValue",
    "expected_increasing_paths",
    "expected_increasing_trails_upper",
    "trail_threshold",
    "sparse_threshold",
    "first_moment_cutoff",
    "count_increasing_paths",
    "expectation_rows",
]


@dataclass(frozen=True)
class RegimeQuery:
    n: int
    p: float
    k: int
    eps: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.k < 1:
            raise ValueError("k must be at least 1")


class LogValue(NamedTuple):
    """A non-negative quantity as ``(log, value)``; ``value`` is ``inf`` when it overflows."""

    log: float
    value: float

    @classmethod
    def from_log(cls, log: float) -> "LogValue":
        if log == -math.inf:
            return cls(log, 0.0)
        try:
            return cls(log, math.exp(log))
        except OverflowError:
            return cls(log, math.inf)


def _log_p_power(p: float, k: int) -> float:
    if k == 0:
        return 0.0
    return -math.inf if p == 0.0 else k * math.log(p)


def expected_increasing_paths(n: int, k: int, p: float) -> LogValue:
    """Expected number of increasing paths with ``k`` edges in ``G(n, p)`` under a random ordering.

    There are ``n!/(n-k-1)!`` directed vertex sequences, each present with
    probability ``p^k`` and increasing with probability ``1/k!``.
    """
    if k > n - 1:
        return LogValue(-math.inf, 0.0)
    log = (math.lgamma(n + 1) - math.lgamma(n - k) + _log_p_power(p, k) - math.lgamma(k + 1))
    return LogValue.from_log(log)


def expected_increasing_trails_upper(n: int, k: int, p: float) -> LogValue:
    """The bound ``n^{k+1} p^k / k!`` on the expected number of increasing trails of length ``k``."""
    log = (k + 1) * math.log(n) + _log_p_power(p, k) - math.lgamma(k + 1)
    return LogValue.from_log(log)


def trail_threshold(n: int, p: float, eps: float = 0.0) -> float:
    """``(1 + eps) * e * n * p``."""
    return (1.0 + eps) * math.e * n * p


def sparse_threshold(n: int) -> float:
    """``ln n / ln ln n``."""
    if n < 3:
        raise ValueError("sparse_threshold needs n >= 3")
    return math.log(n) / math.log(math.log(n))


def first_moment_cutoff(n: int, p: float, k_max: int | None = None) -> int | None:
    """Smallest ``k`` at which the trail-count bound drops below 1, or ``None`` up to ``k_max``."""
    if p == 0.0:
        return 1
    limit = k_max if k_max is not None else max(16, int(4 * math.e * n * p) + 16)
    for k in range(1, limit + 1):
        if expected_increasing_trails_upper(n, k, p).log < 0.0:
            return k
    return None


def count_increasing_paths(og: OrderedGraph, k: int) -> int:
    """Exact number of increasing paths with ``k`` edges, counted with direction."""
    g = og.graph
    return int(_kernels.count_increasing_paths(g.n, g.indptr, g.adj_vertex, g.adj_edge,
                                               og.rank.astype(np.int64), k))


def expectation_rows(ns: Iterable[int], ps: Iterable[float], ks: Iterable[int],
                     eps: float = 0.0) -> list[dict]:
    """One row per ``(n, p, k)`` with both expectations and the thresholds."""
    rows = []
    for n in ns:
        for p in ps:
            cutoff = first_moment_cutoff(n, p)
            for k in ks:
                paths = expected_increasing_paths(n, k, p)
                trails = expected_increasing_trails_upper(n, k, p)
                rows.append({
                    "n": n, "p": p, "k": k,
                    "log_paths": paths.log, "paths": paths.value,
                    "log_trails_upper": trails.log, "trails_upper": trails.value,
                    "trail_threshold": trail_threshold(n, p, eps),
                    "sparse_threshold": sparse_threshold(n) if n >= 3 else math.nan,
                    "first_moment_cutoff": cutoff if cutoff is not None else -1,
                })
    return rows
