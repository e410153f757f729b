import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from inctrails.graphs import (BudgetExceededError, EdgeOrdering, Graph, GraphError, OrderedGraph,
                              gen_complete, gen_dary_tree, gen_gnm, gen_gnp, gen_path,
                              ordering_from_reals, random_ordering, tree_edge_count)
from inctrails.solvers import longest_increasing_trail

from conftest import small_graphs


def test_gnp_p0_is_empty():
    g = gen_gnp(5, 0.0, 1)
    assert g.n == 5 and g.m == 0


def test_gnp_p1_is_complete():
    g = gen_gnp(5, 1.0, 1)
    assert g.m == 10
    g.audit()


def test_gnp_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gen_gnp(5, 1.5, 0)
    with pytest.raises(ValueError):
        gen_gnp(5, -0.1, 0)
    with pytest.raises(ValueError):
        gen_gnp(0, 0.5, 0)


def test_gnp_mean_edge_count():
    n, p, seeds = 10_000, 1e-3, 1000
    counts = np.array([gen_gnp(n, p, s).m for s in range(seeds)])
    pairs = n * (n - 1) // 2
    mean, var = pairs * p, pairs * p * (1 - p)
    assert abs(counts.mean() - mean) <= 4 * math.sqrt(var / seeds)


def test_gnp_pairs_are_independent_per_position():
    # every pair appears with frequency p, including the first and last pair index
    n, p, seeds = 6, 0.3, 4000
    hits = Counter()
    for s in range(seeds):
        hits.update(map(tuple, gen_gnp(n, p, s).edges.tolist()))
    sd = math.sqrt(p * (1 - p) / seeds)
    for pair in itertools.combinations(range(n), 2):
        assert abs(hits[pair] / seeds - p) <= 5 * sd


def test_gnm_full_and_empty():
    assert gen_gnm(4, 6, 0).m == 6
    assert gen_gnm(4, 0, 0).m == 0
    with pytest.raises(ValueError):
        gen_gnm(4, 7, 0)


def test_gnm_is_uniform_over_edge_sets():
    trials = 45_500
    freq = Counter(tuple(map(tuple, gen_gnm(6, 3, s).edges.tolist())) for s in range(trials))
    assert len(freq) == math.comb(15, 3)
    observed = np.array(list(freq.values()))
    _, pvalue = stats.chisquare(observed)
    assert pvalue > 1e-3


def test_complete_graph():
    g = gen_complete(6)
    assert g.m == 15
    assert np.all(g.degree == 5)


@pytest.mark.parametrize("D,k,edges,vertices", [(1, 3, 3, 4), (2, 2, 6, 7), (3, 3, 39, 40)])
def test_dary_tree_sizes(D, k, edges, vertices):
    g, root, level = gen_dary_tree(D, k)
    assert (g.m, g.n, root) == (edges, vertices)+ (0,)
    assert tree_edge_count(D, k) == edges
    assert level.max() == k
    assert np.count_nonzero(level == k) == D ** k


def test_dary_tree_budget():
    with pytest.raises(BudgetExceededError, match="has_increasing_root_leaf_path"):
        gen_dary_tree(10, 10, max_edges=1000)


def test_random_ordering_single_edge():
    g = Graph(2, [(0, 1)])
    assert random_ordering(g, 3).labels.tolist() == [1]


def test_random_ordering_hits_all_permutations_uniformly():
    g = gen_path(3)
    seen = Counter(tuple(random_ordering(g, s).labels.tolist()) for s in range(6000))
    assert len(seen) == 6
    _, pvalue = stats.chisquare(list(seen.values()))
    assert pvalue > 1e-3


def test_random_ordering_reproducible():
    g = gen_complete(8)
    assert random_ordering(g, 11) == random_ordering(g, 11)
    assert random_ordering(g, 11) != random_ordering(g, 12)


def test_ordering_from_reals_examples():
    assert ordering_from_reals([0.9, 0.1, 0.5]).labels.tolist() == [3, 1, 2]
    assert ordering_from_reals([0.5, 0.5]).labels.tolist() == [1, 2]


def test_edge_ordering_rejects_non_bijection():
    with pytest.raises(GraphError):
        EdgeOrdering([1, 1, 2])
    with pytest.raises(GraphError):
        EdgeOrdering([0, 1])


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)]])
def test_graph_rejects_bad_edges(edges):
    with pytest.raises(GraphError):
        Graph(3, edges)


def test_ordered_graph_length_mismatch():
    with pytest.raises(GraphError):
        OrderedGraph(gen_path(3), EdgeOrdering([1, 2]))


def test_induced_subgraph_keeps_ids():
    g = gen_complete(5)
    h, vids, eids = g.induced([1, 3, 4])
    assert h.n == 3 and h.m == 3
    assert vids.tolist() == [1, 3, 4]
    for local, e in enumerate(eids):
        u, v = g.edges[e]
        assert sorted(vids[h.edges[local]].tolist()) == [u, v]


@given(small_graphs())
def test_generated_graphs_pass_audit(g):
    g.audit()
    assert g.adj_vertex.size == 2 * g.m


@given(st.integers(1, 40), st.floats(0, 1), st.integers(0, 2 ** 32))
def test_gnp_audit_property(n, p, seed):
    gen_gnp(n, p, seed).audit()


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_rank_transform_preserves_strict_order(x):
    lab = ordering_from_reals(x).labels
    for i in range(len(x)):
        for j in range(len(x)):
            if x[i] < x[j]:
                assert lab[i] < lab[j]
            if x[i] == x[j] and i < j:
                assert lab[i] < lab[j]


@given(small_graphs(min_edges=1), st.integers(0, 2 ** 32))
def test_solver_same_on_reals_and_ranks(g, seed):
    x = np.random.default_rng(seed).random(g.m)
    on_reals = longest_increasing_trail(OrderedGraph(g, x))
    on_ranks = longest_increasing_trail(OrderedGraph(g, ordering_from_reals(x)))
    assert on_reals.edge_indices == on_ranks.edge_indices
