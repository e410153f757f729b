import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from inctrails.graphs import Graph, OrderedGraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_graphs(draw, max_n=7, min_edges=0, max_edges=None):
    n = draw(st.integers(min_value=2, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    cap = len(pairs) if max_edges is None else min(max_edges, len(pairs))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, cap), max_size=cap))
    return Graph(n, chosen)


@st.composite
def small_ordered(draw, max_n=7, min_edges=0, max_edges=None):
    g = draw(small_graphs(max_n=max_n, min_edges=min_edges, max_edges=max_edges))
    perm = draw(st.permutations(list(range(1, g.m + 1))))
    return OrderedGraph(g, np.asarray(perm, dtype=np.int64))


def random_small_ordered(rng, max_n=7, max_edges=None):
    """A G(n, p) with random n <= max_n, random p and a uniform ordering."""
    n = int(rng.integers(2, max_n + 1))
    pairs = list(itertools.combinations(range(n), 2))
    p = rng.uniform(0.2, 1.0)
    edges = [e for e in pairs if rng.random() < p]
    if max_edges is not None:
        edges = edges[:max_edges]
    g = Graph(n, edges)
    return OrderedGraph(g, rng.permutation(g.m) + 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record a one-line pass/fail verdict, printed in the terminal summary."""
    log = request.config.stash.setdefault(_VERDICTS, [])

    def record(label, ok, detail=""):
        log.append(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":").rstrip("abc"))):
            terminalreporter.write_line(line)
