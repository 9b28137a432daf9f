"""Influence maximization under the hypergraph linear threshold model."""

from .cascade import ActivationTracker, CascadeResult, CascadeState, run_cascade, seed_vector
from .errors import HypergraphError
from .gen import GeneratorSpec, generate
from .hci import HciScorer, HciTable, enumerate_subcritical_paths, hci0, hci1, hci2, hci_n
from .hypergraph import (
    Hypergraph,
    activation_count,
    bipartite_ball,
    build_hypergraph,
    giant_component,
    hyperdegree,
    load_hyperedge_list,
    write_hyperedge_list,
)
from .msgpass import MessageState, final_state, fixed_point, init_messages, message_norm, update_step
from .seedsel import SELECTORS, SelectionConfig, SelectionResult, hci_tm_select, select

__version__ = "0.1.0"

__all__ = [
    "ActivationTracker", "CascadeResult", "CascadeState", "run_cascade", "seed_vector",
    "HypergraphError", "GeneratorSpec", "generate",
    "HciScorer", "HciTable", "enumerate_subcritical_paths", "hci0", "hci1", "hci2", "hci_n",
    "Hypergraph", "activation_count", "bipartite_ball", "build_hypergraph", "giant_component",
    "hyperdegree", "load_hyperedge_list", "write_hyperedge_list",
    "MessageState", "final_state", "fixed_point", "init_messages", "message_norm", "update_step",
    "SELECTORS", "SelectionConfig", "SelectionResult", "hci_tm_select", "select",
]
