"""Hypergraph Collective Influence (HCI) scores.

HCI_n(i) counts the subcritical paths of arc length 1 .. n+1 that start at an
inactive node ``i`` and only visit inactive nodes and hyperedges:

* node -> edge hops are always allowed from ``i``; from an interior node j
  they need j to be a non-seed with no other hyperedge already firing
  towards it (the M indicator);
* edge -> node hops need the edge to be exactly one activation short when
  the two endpoints are left out (the I indicator).

Paths never revisit a node or a hyperedge.

The indicators are evaluated on the messages implied by an activation
snapshot (see :func:`hcitm.msgpass.messages_from_activation`).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .cascade import CascadeState, _check_seeds
from .errors import DepthTooLarge
from .hypergraph import Hypergraph
from .msgpass import indicator_I, indicator_M, messages_from_activation

__all__ = [
    "DEFAULT_MAX_ORDER",
    "HciTable",
    "HciScorer",
    "SubcriticalPath",
    "hci0",
    "hci1",
    "hci2",
    "hci_n",
    "enumerate_subcritical_paths",
    "write_scores_csv",
]

DEFAULT_MAX_ORDER = 8


@dataclass
class HciTable:
    order: int
    scores: np.ndarray

    def argmax(self) -> int:
        # np.argmax returns the first maximum, i.e. the lowest id
        return int(np.argmax(self.scores))


@dataclass(frozen=True)
class SubcriticalPath:
    """Alternating node/edge sequence starting at a node."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.nodes) + len(self.edges) - 1

    def elements(self):
        out = []
        for k, i in enumerate(self.nodes):
            out.append(("node", i))
            if k < len(self.edges):
                out.append(("edge", self.edges[k]))
        if len(self.edges) > len(self.nodes):
            out.append(("edge", self.edges[-1]))
        return out


class HciScorer:
    """Per-node HCI evaluation against live activation arrays.

    The arrays are referenced, not copied, so a scorer built on an
    :class:`~hcitm.cascade.ActivationTracker` always sees its current state.
    ``node_active`` must already include the seeds.
    """

    def __init__(self, H: Hypergraph, node_active, edge_active, count, seeds, order: int):
        self.H = H
        self.act = node_active
        self.edge_act = edge_active
        self.count = count
        self.seeds = seeds
        self.order = order
        self.m = H.m.tolist()

    @classmethod
    def from_state(cls, H: Hypergraph, state: CascadeState | None, seeds=None, order: int = 2):
        if state is None:
            state = CascadeState.empty(H)
        act = state.node_active.copy()
        if seeds is None:
            seeds = np.zeros(H.N, dtype=bool)
        else:
            seeds = _check_seeds(H, seeds)
            act |= seeds
        count = [sum(1 for j in mem if act[j]) for mem in H.members]
        return cls(H, bytearray(act.astype(np.uint8)), bytearray(state.edge_active.astype(np.uint8)),
                   count, bytearray(seeds.astype(np.uint8)), order)

    def _fires(self, e: int, j: int) -> int:
        # message e -> j: e is active, or the other members already suffice
        return 1 if self.edge_act[e] or self.count[e] - self.act[j] >= self.m[e] else 0

    def score(self, i: int) -> int:
        if self.order <= 2:
            return self.closed_form(i)
        return self.count_paths(i, self.order + 1)

    def closed_form(self, i: int) -> int:
        """HCI_0 / HCI_1 / HCI_2 as explicit sums."""
        if self.act[i]:
            return 0
        H, act, edge_act, count, m = self.H, self.act, self.edge_act, self.count, self.m
        order = self.order
        s = 0
        for e in H.incident[i]:
            if edge_act[e]:
                continue
            s += 1
            if order == 0 or count[e] != m[e] - 1:
                continue
            for j in H.members[e]:
                if j == i or act[j]:
                    continue
                s += 1
                if order < 2 or self.seeds[j]:
                    continue
                inc = H.incident[j]
                fire = [self._fires(f, j) for f in inc]
                total = sum(fire)
                back = fire[inc.index(e)]
                for f, ff in zip(inc, fire):
                    if f != e and not edge_act[f] and total - back - ff == 0:
                        s += 1
        return s

    def count_paths(self, i: int, max_len: int) -> int:
        """Number of subcritical paths from ``i`` with 1..max_len arcs."""
        if self.act[i] or max_len < 1:
            return 0
        H, act, edge_act, count, m, seeds = self.H, self.act, self.edge_act, self.count, self.m, self.seeds
        on_path_nodes = {i}
        on_path_edges = set()
        total = 0

        def from_node(j, prev, length):
            nonlocal total
            if prev is not None:
                if seeds[j]:
                    return
                inc = H.incident[j]
                fire = {f: self._fires(f, j) for f in inc}
                base = sum(fire.values()) - fire[prev]
            for e in H.incident[j]:
                if e == prev or edge_act[e] or e in on_path_edges:
                    continue
                if prev is not None and base - fire[e] != 0:
                    continue
                total += 1
                if length + 1 >= max_len or count[e] != m[e] - 1:
                    continue
                on_path_edges.add(e)
                for k in H.members[e]:
                    if k in on_path_nodes or act[k]:
                        continue
                    total += 1
                    if length + 2 < max_len:
                        on_path_nodes.add(k)
                        from_node(k, e, length + 2)
                        on_path_nodes.discard(k)
                on_path_edges.discard(e)

        from_node(i, None, 0)
        return total


def _table(H, state, seeds, order, fn) -> HciTable:
    scorer = HciScorer.from_state(H, state, seeds, order)
    scores = np.array([fn(scorer, i) for i in range(H.N)], dtype=np.int64)
    return HciTable(order, scores)


def hci0(H: Hypergraph, state: CascadeState | None = None, seeds=None) -> HciTable:
    """Inactive hyperdegree of every inactive node (active nodes score 0)."""
    scorer = HciScorer.from_state(H, state, seeds, 0)
    act = np.frombuffer(bytes(scorer.act), dtype=np.uint8).astype(bool)
    live = ~np.frombuffer(bytes(scorer.edge_act), dtype=np.uint8).astype(bool)
    scores = np.array([sum(1 for e in inc if live[e]) for inc in H.incident], dtype=np.int64)
    scores[act] = 0
    return HciTable(0, scores)


def hci1(H: Hypergraph, state: CascadeState | None = None, seeds=None) -> HciTable:
    return _table(H, state, seeds, 1, HciScorer.closed_form)


def hci2(H: Hypergraph, state: CascadeState | None = None, seeds=None) -> HciTable:
    return _table(H, state, seeds, 2, HciScorer.closed_form)


def hci_n(
    H: Hypergraph,
    state: CascadeState | None = None,
    seeds=None,
    n: int = 2,
    max_order: int = DEFAULT_MAX_ORDER,
) -> HciTable:
    """HCI of order ``n`` by depth-first path counting."""
    if n < 0:
        raise ValueError("order must be non-negative")
    if n > max_order:
        raise DepthTooLarge(f"order {n} exceeds cap {max_order}")
    return _table(H, state, seeds, n, lambda sc, i: sc.count_paths(i, n + 1))


def enumerate_subcritical_paths(
    H: Hypergraph,
    state: CascadeState | None,
    seeds,
    i: int,
    max_len: int,
    max_order: int = DEFAULT_MAX_ORDER,
) -> list[SubcriticalPath]:
    """List every subcritical path from ``i`` with at most ``max_len`` arcs.

    Slow reference: indicators come from :mod:`hcitm.msgpass` evaluated on
    explicit per-arc messages.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    if max_len > max_order + 1:
        raise DepthTooLarge(f"max_len {max_len} exceeds cap {max_order + 1}")
    H.check_node(i)
    if state is None:
        state = CascadeState.empty(H)
    seeds = np.zeros(H.N, dtype=bool) if seeds is None else _check_seeds(H, seeds)
    msgs = messages_from_activation(H, state, seeds)
    node_on = state.node_active | seeds
    edge_on = state.edge_active
    if node_on[i]:
        return []

    found: list[SubcriticalPath] = []

    def walk(nodes, edges):
        length = len(nodes) + len(edges) - 1
        if length == max_len:
            return
        if len(nodes) > len(edges):
            j = nodes[-1]
            for e in H.incident[j]:
                if e in edges or edge_on[e]:
                    continue
                if len(nodes) > 1:
                    if seeds[j] or not indicator_M(H, msgs, edges[-1], j, e):
                        continue
                path = SubcriticalPath(nodes, edges + (e,))
                found.append(path)
                walk(path.nodes, path.edges)
        else:
            e, j = edges[-1], nodes[-1]
            for k in H.members[e]:
                if k in nodes or node_on[k]:
                    continue
                if not indicator_I(H, msgs, j, e, k):
                    continue
                path = SubcriticalPath(nodes + (k,), edges)
                found.append(path)
                walk(path.nodes, path.edges)

    walk((i,), ())
    return found


def write_scores_csv(H: Hypergraph, table: HciTable, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["node", f"hci{table.order}"])
    for i in np.argsort(np.asarray(H.labels), kind="stable"):
        w.writerow([H.labels[i], int(table.scores[i])])
