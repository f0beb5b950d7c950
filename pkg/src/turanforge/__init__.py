"""Extremal graph constructions, exact Turan/Zarankiewicz search,
forbidden-subgraph detection and sparse regularity tools."""
from .graph import Graph, BipartiteGraph, PartLabeledGraph, GraphError, from_edge_list
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["Graph", "BipartiteGraph", "PartLabeledGraph", "GraphError", "from_edge_list",
           "BACKEND", "__version__"]
