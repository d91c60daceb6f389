"""Inverse graphs on F_p as hard Maximum Independent Set instances: cycle
census, cycle-chain refutation bounds, exact solving and spectral checks."""

from .graph import Graph, InverseGraph, build_inverse_graph
from .solver import LoopPolicy, solve_exact

__version__ = "0.1.0"

__all__ = ["Graph", "InverseGraph", "LoopPolicy", "build_inverse_graph", "solve_exact"]
