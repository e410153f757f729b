import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inctrails.graphs import (Graph, OrderedGraph, gen_complete, gen_cycle, gen_gnm, gen_gnp, gen_path,
                              gen_star, random_ordered)
from inctrails.seeding import Seed
from inctrails.solvers import (Path, SearchBudget, SearchBudgetExceeded, Trail,
                               enumerate_paths_bruteforce, enumerate_trails_bruteforce,
                               longest_increasing_path_exact, longest_increasing_trail, probe_segments,
                               sparse_probe, trail_length, validate_path, validate_trail)
from inctrails.worstcase import m_star_exhaustive, sampled_trail_lengths

from conftest import random_small_ordered, small_ordered


def triangle():
    # a=0, b=1, c=2 with ab:1, bc:2, ca:3
    return OrderedGraph(Graph(3, [(0, 1), (1, 2), (0, 2)]), [1, 2, 3])


def test_triangle_trail_is_the_whole_circuit():
    t = longest_increasing_trail(triangle())
    assert t.length == 3
    assert t.vertices in ((0, 1, 2, 0),)
    assert t.labels == (1, 2, 3)


def test_two_edge_path_walked_backwards():
    # a-b:2, b-c:1 read from c gives labels 1, 2
    og = OrderedGraph(Graph(3, [(0, 1), (1, 2)]), [2, 1])
    t = longest_increasing_trail(og)
    assert t.length == 2 == enumerate_trails_bruteforce(og)
    assert t.vertices == (2, 1, 0)


def test_matching_gives_length_one():
    # any two adjacent edges increase in one direction, so length 1 needs disjoint edges
    og = OrderedGraph(Graph(6, [(0, 1), (2, 3), (4, 5)]), [3, 1, 2])
    assert longest_increasing_trail(og).length == 1


def test_endpoint_updates_are_simultaneous():
    # reading a just-updated endpoint would let edge 0-1 count twice and report 3
    og = OrderedGraph(Graph(3, [(0, 1), (1, 2)]), [1, 2])
    assert longest_increasing_trail(og).length == 2
    assert trail_length(og) == 2
    single = OrderedGraph(Graph(2, [(0, 1)]), [1])
    assert longest_increasing_trail(single).length == 1


def test_empty_graph():
    og = OrderedGraph(Graph(4), [])
    assert longest_increasing_trail(og).length == 0
    path, exact = longest_increasing_path_exact(og)
    assert path.length == 0 and exact


def test_triangle_path_is_two():
    path, exact = longest_increasing_path_exact(triangle())
    assert path.length == 2 and exact


@pytest.mark.parametrize("labels", [[1, 2, 3], [3, 1, 2], [2, 3, 1]])
def test_star_path_is_two(labels):
    og = OrderedGraph(gen_star(3), labels)
    path, exact = longest_increasing_path_exact(og)
    assert path.length == 2 and exact


def test_bruteforce_examples():
    single = OrderedGraph(Graph(2, [(0, 1)]), [1])
    assert enumerate_trails_bruteforce(single) == 1
    assert enumerate_paths_bruteforce(single) == 1
    assert enumerate_trails_bruteforce(triangle()) == 3
    assert enumerate_paths_bruteforce(triangle()) == 2


def test_bruteforce_guard():
    og = random_ordered(gen_complete(8), 0)
    with pytest.raises(ValueError):
        enumerate_trails_bruteforce(og)


def test_oracle_equivalence_on_200_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        og = random_small_ordered(rng, max_n=7)
        trail = longest_increasing_trail(og)
        path, exact = longest_increasing_path_exact(og)
        assert exact
        assert trail.length == enumerate_trails_bruteforce(og)
        assert path.length == enumerate_paths_bruteforce(og)
        assert validate_trail(og, trail)
        assert validate_path(og, path)


@given(small_ordered(max_n=6))
def test_path_never_longer_than_trail(og):
    path, _ = longest_increasing_path_exact(og)
    assert path.length <= longest_increasing_trail(og).length
    assert enumerate_paths_bruteforce(og) <= enumerate_trails_bruteforce(og)


@given(small_ordered(), st.integers(0, 2 ** 32 - 1))
def test_strictly_increasing_relabel_changes_nothing(og, seed):
    rng = np.random.default_rng(seed)
    # any strictly increasing map of the ranks: random positive gaps, then a cube
    gaps = rng.uniform(0.1, 5.0, size=og.m)
    vals = np.cumsum(gaps) ** 3
    relabeled = OrderedGraph(og.graph, vals[og.rank - 1])
    a, b = longest_increasing_trail(og), longest_increasing_trail(relabeled)
    assert (a.vertices, a.edge_indices) == (b.vertices, b.edge_indices)
    pa, _ = longest_increasing_path_exact(og)
    pb, _ = longest_increasing_path_exact(relabeled)
    assert (pa.vertices, pa.edge_indices) == (pb.vertices, pb.edge_indices)


@settings(max_examples=40)
@given(small_ordered(max_n=7, max_edges=8))
def test_every_ordering_beats_average_degree(og):
    g = og.graph
    if g.m == 0:
        return
    assert m_star_exhaustive(g).value >= 2 * g.m / g.n


@pytest.mark.parametrize("graph", [gen_complete(6), gen_cycle(9), gen_gnm(12, 30, 5), gen_star(7)],
                         ids=["K6", "C9", "gnm12", "star7"])
def test_sampled_orderings_beat_average_degree(graph):
    lengths = sampled_trail_lengths(graph, 10_000, Seed(11))
    assert lengths.min() >= 2 * graph.m / graph.n


def test_witness_validation_failures():
    og = triangle()
    good = longest_increasing_trail(og)
    assert validate_trail(og, good)

    swapped = OrderedGraph(og.graph, [2, 1, 3])
    verdict = validate_trail(swapped, Trail(good.vertices, good.edge_indices))
    assert not verdict and verdict.reason == "not-increasing"

    cyc = OrderedGraph(gen_path(1), [1])
    verdict = validate_trail(cyc, Trail((0, 1, 0), (0, 0)))
    assert not verdict and verdict.reason == "repeated-edge"

    verdict = validate_path(og, Path(good.vertices, good.edge_indices))
    assert not verdict and verdict.reason == "repeated-vertex"

    verdict = validate_trail(og, Trail((0, 2), (0,)))
    assert not verdict and verdict.reason == "not-incident"


def test_witness_json_round_trip():
    t = longest_increasing_trail(random_ordered(gen_gnp(30, 0.3, 1), 1))
    back = Trail.from_dict(json.loads(t.to_json()))
    assert back == t


def test_budget_fail_policy_raises():
    og = random_ordered(gen_complete(9), 3)
    with pytest.raises(SearchBudgetExceeded) as info:
        longest_increasing_path_exact(og, SearchBudget(5, "fail"))
    assert validate_path(og, info.value.best)


def test_budget_best_policy_flags_inexact():
    og = random_ordered(gen_complete(9), 3)
    path, exact = longest_increasing_path_exact(og, SearchBudget(5, "best"))
    assert not exact and validate_path(og, path)
    full, exact_full = longest_increasing_path_exact(og)
    assert exact_full and full.length >= path.length


@pytest.mark.parametrize("bad", [dict(max_expansions=0), dict(on_exhaust="maybe")])
def test_budget_rejects_bad_values(bad):
    with pytest.raises(ValueError):
        SearchBudget(**bad)


def test_large_graph_path_search_uses_hash_sets():
    og = random_ordered(gen_gnp(300, 0.02, 4), 4)
    path, exact = longest_increasing_path_exact(og, SearchBudget(200_000, "best"))
    assert validate_path(og, path)
    assert path.length <= longest_increasing_trail(og).length


def test_sparse_probe_increasing_path():
    og = OrderedGraph(gen_path(6), [1, 2, 3, 4, 5, 6])
    assert sparse_probe(og, 3) == 2


def test_sparse_probe_reversed_path():
    og = OrderedGraph(gen_path(6), [6, 5, 4, 3, 2, 1])
    assert sparse_probe(og, 3) == 2


def test_sparse_probe_too_short():
    og = OrderedGraph(gen_path(2), [1, 2])
    assert sparse_probe(og, 3) == 0
    assert sparse_probe(OrderedGraph(Graph(5), []), 2) == 0


def test_sparse_probe_mean_matches_two_over_k_factorial():
    n, k, trials = 100_000, 4, 100
    q = 2 / math.factorial(k)
    hits = segs = 0
    var = 0.0
    for t in range(trials):
        s = Seed(77).child(t)
        og = random_ordered(gen_gnp(n, 2 / n, s), s)
        h, total = probe_segments(og, k)
        hits += h
        segs += total
        var += total * q * (1 - q)
    assert segs > 0
    assert abs(hits / trials - segs * q / trials) <= 4 * math.sqrt(var) / trials
