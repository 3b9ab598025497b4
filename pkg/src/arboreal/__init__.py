"""Exact computations for the arboreal gas (weighted random spanning forests)."""

__version__ = "0.1.0"

from .exact import BetaPolynomial, as_fraction, fmt
from .graph import Edge, EdgeMap, Multigraph, read_graph, write_graph
from .forest import EventSpec, enumerate_mu, mu, partition_function, prob
from .electrical import effective_resistance, tree_count, unit_current_flow
from .correlation import kn_closed_forms, nc_pair
from .reduction import pushforward_check, reduce_pipeline

__all__ = [
    "BetaPolynomial",
    "Edge",
    "EdgeMap",
    "EventSpec",
    "Multigraph",
    "as_fraction",
    "effective_resistance",
    "enumerate_mu",
    "fmt",
    "kn_closed_forms",
    "mu",
    "nc_pair",
    "partition_function",
    "prob",
    "pushforward_check",
    "read_graph",
    "reduce_pipeline",
    "tree_count",
    "unit_current_flow",
    "write_graph",
]
