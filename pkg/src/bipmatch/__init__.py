"""Combinatorial maximum bipartite matching via restricted decremental
shortest paths, with the supporting expander machinery and oracle-backed
benchmark harness."""

from .constants import Constants
from .driver import DriverConfig, max_matching
from .graph_core import BipartiteGraph, Matching, residual_graph
from .oracles import hopcroft_karp

__all__ = [
    "BipartiteGraph",
    "Constants",
    "DriverConfig",
    "Matching",
    "hopcroft_karp",
    "max_matching",
    "residual_graph",
]
