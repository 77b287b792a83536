"""Constructive extension of precoloured cliques to strictly f-degenerate transversals."""

from .decomposition import augment_to_maximal, greedy_extend, solve_decomposition
from .nt import FNTInstance, SolverStats, extend_near_triangulation, extend_nt_dp, run_fan_recursion
from .orders import merge_transversals, normalize_order
from .tree import DecompositionTree, Leaf, SumNode, complete_graph, single_leaf_tree, wagner_graph

__all__ = [
    "DecompositionTree",
    "FNTInstance",
    "Leaf",
    "SolverStats",
    "SumNode",
    "augment_to_maximal",
    "complete_graph",
    "extend_near_triangulation",
    "extend_nt_dp",
    "greedy_extend",
    "merge_transversals",
    "normalize_order",
    "run_fan_recursion",
    "single_leaf_tree",
    "solve_decomposition",
    "wagner_graph",
]
