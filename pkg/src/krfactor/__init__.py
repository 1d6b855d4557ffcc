"""Decide K_r-factors in dense graphs, with checkable certificates."""

from .certificate import Certificate, verify_certificate
from .graph import Graph, Partition, load_graph, read_graph, verify_tiling
from .solver import solve_auto

__all__ = ["Certificate", "Graph", "Partition", "load_graph", "read_graph", "solve_auto", "verify_certificate", "verify_tiling"]
__version__ = "0.1.0"
