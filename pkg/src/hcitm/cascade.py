"""Synchronous threshold cascades.

Odd steps activate every inactive hyperedge whose active-member count has
reached its activation count; even steps activate every inactive member of
a hyperedge activated in the previous step. Seeds are the step-0 set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import EdgeAlreadyActive, SizeMismatch
from .hypergraph import Hypergraph

__all__ = [
    "CascadeState",
    "CascadeResult",
    "ActivationTracker",
    "seed_vector",
    "seed_fraction",
    "run_cascade",
    "activation_fraction",
    "residual_requirement",
    "write_trace_csv",
]


def seed_vector(H: Hypergraph, ids: Iterable[int] = ()) -> np.ndarray:
    """Boolean seed vector over ``H``'s nodes from dense ids."""
    n = np.zeros(H.N, dtype=bool)
    for i in ids:
        H.check_node(i)
        n[i] = True
    return n


def seed_fraction(seeds) -> float:
    seeds = np.asarray(seeds, dtype=bool)
    return float(seeds.sum() / seeds.size) if seeds.size else 0.0


def _check_seeds(H: Hypergraph, seeds) -> np.ndarray:
    seeds = np.asarray(seeds, dtype=bool)
    if seeds.shape != (H.N,):
        raise SizeMismatch(f"seed vector has shape {seeds.shape}, hypergraph has {H.N} nodes")
    return seeds


@dataclass
class CascadeState:
    node_active: np.ndarray
    edge_active: np.ndarray
    # (t, newly activated ids); even t -> nodes, odd t -> hyperedges
    trace: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    steps: int = 0

    @classmethod
    def empty(cls, H: Hypergraph) -> CascadeState:
        return cls(np.zeros(H.N, dtype=bool), np.zeros(H.M, dtype=bool))

    def active_members(self, H: Hypergraph) -> np.ndarray:
        """Number of active members of every hyperedge."""
        act = self.node_active
        return np.array([sum(1 for j in mem if act[j]) for mem in H.members], dtype=np.int64)

    def trace_rows(self):
        for t, ids in self.trace:
            kind = "node" if t % 2 == 0 else "edge"
            for x in ids:
                yield t, kind, x


@dataclass
class CascadeResult:
    Q: float
    final: CascadeState


class ActivationTracker:
    """Incremental cascade engine.

    Holds the activation masks and per-edge active-member counts of one
    hypergraph, and extends the cascade whenever new seeds are added. Because
    the dynamics are monotone, adding seeds one call at a time reaches the
    same final state as a single run from the union of the seeds.
    """

    def __init__(self, H: Hypergraph):
        self.H = H
        self.node_active = bytearray(H.N)
        self.edge_active = bytearray(H.M)
        self.count = [0] * H.M
        self._m = H.m.tolist()
        self.n_active = 0

    @property
    def Q(self) -> float:
        return self.n_active / self.H.N if self.H.N else 0.0

    def activate(self, seeds: Iterable[int], trace: list | None = None):
        """Seed ``seeds`` and run synchronous rounds to quiescence.

        Returns ``(new_nodes, new_edges, steps)``. When ``trace`` is a list the
        per-step activation sets are appended to it.
        """
        members, incident = self.H.members, self.H.incident
        node_active, edge_active, count, m = self.node_active, self.edge_active, self.count, self._m
        frontier = sorted({s for s in seeds if not node_active[s]})
        for s in frontier:
            node_active[s] = 1
        new_nodes = list(frontier)
        new_edges: list[int] = []
        t = 0
        if frontier and trace is not None:
            trace.append((0, tuple(frontier)))
        while frontier:
            fired = []
            for j in frontier:
                for e in incident[j]:
                    count[e] += 1
                    if not edge_active[e] and count[e] >= m[e]:
                        edge_active[e] = 1
                        fired.append(e)
            if not fired:
                break
            t += 1
            fired.sort()
            new_edges.extend(fired)
            if trace is not None:
                trace.append((t, tuple(fired)))
            frontier = []
            for e in fired:
                for k in members[e]:
                    if not node_active[k]:
                        node_active[k] = 1
                        frontier.append(k)
            if not frontier:
                break
            t += 1
            frontier.sort()
            new_nodes.extend(frontier)
            if trace is not None:
                trace.append((t, tuple(frontier)))
        self.n_active += len(new_nodes)
        return new_nodes, new_edges, t

    def state(self) -> CascadeState:
        return CascadeState(
            np.frombuffer(bytes(self.node_active), dtype=np.uint8).astype(bool),
            np.frombuffer(bytes(self.edge_active), dtype=np.uint8).astype(bool),
        )


def run_cascade(H: Hypergraph, seeds, record_trace: bool = True) -> CascadeResult:
    """Run the cascade from a boolean seed vector.

    >>> from hcitm.hypergraph import build_hypergraph
    >>> H = build_hypergraph([[1, 2], [2, 3]], 0.5)
    >>> run_cascade(H, seed_vector(H, [0])).Q
    1.0
    """
    seeds = _check_seeds(H, seeds)
    tracker = ActivationTracker(H)
    trace: list | None = [] if record_trace else None
    _, _, steps = tracker.activate(np.flatnonzero(seeds).tolist(), trace)
    state = tracker.state()
    state.trace = trace or []
    state.steps = steps
    return CascadeResult(Q=tracker.Q, final=state)


def activation_fraction(result: CascadeResult) -> float:
    act = result.final.node_active
    return float(act.sum() / act.size) if act.size else 0.0


def residual_requirement(H: Hypergraph, state: CascadeState, e: int) -> int:
    """How many more active members inactive edge ``e`` needs to fire."""
    H.check_edge(e)
    if state.edge_active[e]:
        raise EdgeAlreadyActive(f"edge {e} is already active")
    active = sum(1 for j in H.members[e] if state.node_active[j])
    return max(0, int(H.m[e]) - active)


def write_trace_csv(H: Hypergraph, state: CascadeState, stream: TextIO) -> None:
    """Trace export: ``t,kind,id`` with external node labels and edge ids."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["t", "kind", "id"])
    for t, kind, x in state.trace_rows():
        w.writerow([t, kind, H.labels[x] if kind == "node" else H.edge_labels[x]])
