import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from inctrails.analytics import (LogValue, RegimeQuery, count_increasing_paths, expectation_rows,
                                 expected_increasing_paths, expected_increasing_trails_upper,
                                 first_moment_cutoff, sparse_threshold, trail_threshold)
from inctrails.graphs import OrderedGraph, gen_complete, gen_gnp, random_ordered
from inctrails.seeding import Seed

from conftest import small_ordered


def increasing_paths_by_hand(og, k):
    """Directed vertex sequences with k edges, no repeated vertex, labels increasing."""
    g = og.graph
    label = {}
    for e, (u, v) in enumerate(g.edges.tolist()):
        label[(u, v)] = label[(v, u)] = int(og.rank[e])
    count = 0
    for seq in itertools.permutations(range(g.n), k + 1):
        labs = [label.get((seq[i], seq[i + 1])) for i in range(k)]
        if None not in labs and all(a < b for a, b in zip(labs, labs[1:])):
            count += 1
    return count


def test_k4_two_paths_average_over_all_orderings():
    k4 = gen_complete(4)
    total = sum(increasing_paths_by_hand(OrderedGraph(k4, np.array(perm) + 1), 2)
                for perm in itertools.permutations(range(6)))
    assert total / 720 == 12
    assert expected_increasing_paths(4, 2, 1.0).value == pytest.approx(12.0, rel=1e-12)


def test_single_edge_has_two_increasing_paths():
    assert expected_increasing_paths(2, 1, 1.0).value == pytest.approx(2.0, rel=1e-12)


def test_too_long_paths_expect_zero():
    assert expected_increasing_paths(5, 5, 0.5) == LogValue(-math.inf, 0.0)


@given(small_ordered(max_n=6), st.integers(1, 4))
def test_path_counter_matches_hand_enumeration(og, k):
    assert count_increasing_paths(og, k) == increasing_paths_by_hand(og, k)


def test_expected_paths_match_monte_carlo():
    n, k, p, samples = 100, 5, 0.1, 10_000
    counts = np.empty(samples)
    for s in range(samples):
        seed = Seed(404).child(s)
        counts[s] = count_increasing_paths(random_ordered(gen_gnp(n, p, seed), seed), k)
    expected = expected_increasing_paths(n, k, p).value
    assert abs(counts.mean() - expected) <= 4 * counts.std(ddof=1) / math.sqrt(samples)


def test_trail_bound_examples():
    assert expected_increasing_trails_upper(2, 1, 1.0).value == pytest.approx(4.0)
    assert expected_increasing_trails_upper(2, 1, 1.0).value >= 2
    assert expected_increasing_trails_upper(10, 30, 1.0).value < 1


@given(st.integers(1, 10 ** 6), st.integers(1, 200), st.floats(0.0, 1.0))
def test_trail_bound_dominates_path_expectation(n, k, p):
    assert expected_increasing_trails_upper(n, k, p).log >= expected_increasing_paths(n, k, p).log - 1e-9


@given(st.integers(2, 60), st.integers(1, 30), st.floats(0.01, 1.0))
def test_log_space_agrees_with_direct_arithmetic(n, k, p):
    if k <= n - 1:
        direct = math.comb(n, k + 1) * math.factorial(k + 1) * p ** k / math.factorial(k)
        assert expected_increasing_paths(n, k, p).value == pytest.approx(direct, rel=1e-10)
    direct_upper = n ** (k + 1) * p ** k / math.factorial(k)
    assert expected_increasing_trails_upper(n, k, p).value == pytest.approx(direct_upper, rel=1e-10)


def test_threshold_examples():
    assert trail_threshold(1000, 0.01) == pytest.approx(27.1828, abs=1e-4)
    assert sparse_threshold(10 ** 6) == pytest.approx(5.2615, abs=1e-4)
    assert trail_threshold(1000, 0.01, 0.1) / trail_threshold(1000, 0.01) == pytest.approx(1.1, rel=1e-15)
    with pytest.raises(ValueError):
        sparse_threshold(2)


@pytest.mark.parametrize("n", [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.25, 0.5, 1.0])
def test_first_moment_cutoff_below_threshold(n, eps):
    # "n large enough" made explicit: the bound at k0 is about n (1+eps)^{-k0}
    checked = 0
    for c in [5, 10, 20, 30, 50, 100, 300]:
        p = c / n
        k0 = trail_threshold(n, p, eps)
        if k0 * math.log1p(eps) < 2 * math.log(n):
            continue
        checked += 1
        assert first_moment_cutoff(n, p) <= math.ceil(k0)
    assert checked or eps < 0.25


def test_cutoff_is_first_crossing():
    k = first_moment_cutoff(10 ** 4, 0.005)
    assert expected_increasing_trails_upper(10 ** 4, k, 0.005).log < 0
    assert expected_increasing_trails_upper(10 ** 4, k - 1, 0.005).log >= 0


def test_regime_query_validation():
    RegimeQuery(10, 0.5, 3)
    for bad in [dict(n=0, p=0.5, k=1), dict(n=5, p=1.5, k=1), dict(n=5, p=0.5, k=0)]:
        with pytest.raises(ValueError):
            RegimeQuery(**bad)


def test_expectation_rows_cover_grid():
    rows = expectation_rows([100, 1000], [0.01, 0.1], [2, 5, 10])
    assert len(rows) == 12
    assert {(r["n"], r["p"], r["k"]) for r in rows} == set(itertools.product([100, 1000], [0.01, 0.1], [2, 5, 10]))
