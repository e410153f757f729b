"""Increasing trails and paths in randomly edge-ordered graphs.

Submodules: ``graphs`` (graphs, orderings, generators), ``solvers`` (trail
DP, path search, oracles, validators), ``highgirth`` (girth and core
extraction), ``treelemma`` (random D-ary trees), ``stitching`` (round-based
construction), ``analytics`` (first-moment formulas), ``worstcase``
(minimum over orderings) and ``harness`` (seeded sweeps and output).
"""
from .graphs import (EdgeOrdering, Graph, OrderedGraph, gen_complete, gen_dary_tree, gen_gnm,
                     gen_gnp, ordering_from_reals, random_ordered, random_ordering)
from .seeding import Seed
from .solvers import (Path, SearchBudget, Trail, enumerate_paths_bruteforce,
                      enumerate_trails_bruteforce, longest_increasing_path_exact,
                      longest_increasing_trail, sparse_probe, validate_path, validate_trail)

__version__ = "0.1.0"

__all__ = [
    "EdgeOrdering", "Graph", "OrderedGraph", "Seed", "Trail", "Path", "SearchBudget",
    "gen_complete", "gen_dary_tree", "gen_gnm", "gen_gnp", "ordering_from_reals",
    "random_ordered", "random_ordering", "enumerate_paths_bruteforce",
    "enumerate_trails_bruteforce", "longest_increasing_path_exact", "longest_increasing_trail",
    "sparse_probe", "validate_path", "validate_trail",
]
