"""Immutable hypergraph with per-hyperedge activation thresholds.

Nodes and hyperedges are addressed by dense 0-based integers. The external
node ids seen on input are kept in :attr:`Hypergraph.labels` (sorted
ascending, so "lowest dense id" and "lowest external id" coincide).
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    DuplicateMember,
    EmptyEdge,
    ParseError,
    ThresholdOutOfRange,
    UnknownId,
    UnknownNode,
)

__all__ = [
    "Hypergraph",
    "activation_count",
    "build_hypergraph",
    "load_hyperedge_list",
    "write_hyperedge_list",
    "hyperdegree",
    "giant_component",
    "bipartite_ball",
]


def activation_count(threshold: float, size: int) -> int:
    """Smallest number of active members that activates an edge.

    ``m = ceil(t * size)``; the product is rounded to 9 decimals first so that
    e.g. ``0.6 * 5`` counts as exactly 3.
    """
    return max(1, math.ceil(round(threshold * size, 9)))


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Bidirectional incidence structure.

    ``members[e]`` lists the nodes of hyperedge ``e`` and ``incident[i]`` the
    hyperedges of node ``i``; both are tuples of dense ids.
    """

    members: tuple[tuple[int, ...], ...]
    incident: tuple[tuple[int, ...], ...]
    thresholds: np.ndarray
    labels: tuple[int, ...]
    edge_labels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.edge_labels:
            object.__setattr__(self, "edge_labels", tuple(range(len(self.members))))
        self.thresholds.setflags(write=False)

    @property
    def N(self) -> int:
        return len(self.incident)

    @property
    def M(self) -> int:
        return len(self.members)

    @cached_property
    def m(self) -> np.ndarray:
        """Per-edge activation counts."""
        out = np.array(
            [activation_count(t, len(mem)) for t, mem in zip(self.thresholds, self.members)],
            dtype=np.int64,
        )
        out.setflags(write=False)
        return out

    @cached_property
    def sizes(self) -> np.ndarray:
        out = np.array([len(mem) for mem in self.members], dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def degrees(self) -> np.ndarray:
        out = np.array([len(inc) for inc in self.incident], dtype=np.int64)
        out.setflags(write=False)
        return out

    @property
    def arc_count(self) -> int:
        """S, the number of incidence pairs."""
        return int(self.sizes.sum())

    @cached_property
    def index_of(self) -> dict[int, int]:
        """External node label -> dense id."""
        return {lab: i for i, lab in enumerate(self.labels)}

    def node(self, label: int) -> int:
        try:
            return self.index_of[label]
        except KeyError:
            raise UnknownNode(f"unknown node label {label!r}") from None

    def nodes(self, labels: Iterable[int]) -> list[int]:
        return [self.node(lab) for lab in labels]

    def check_node(self, i: int) -> None:
        if not 0 <= i < self.N:
            raise UnknownNode(f"node id {i} out of range [0, {self.N})")

    def check_edge(self, e: int) -> None:
        if not 0 <= e < self.M:
            raise UnknownId(f"edge id {e} out of range [0, {self.M})")

    def neighbors(self, i: int) -> set[int]:
        """Distinct nodes sharing at least one hyperedge with ``i``."""
        out = set()
        for e in self.incident[i]:
            out.update(self.members[e])
        out.discard(i)
        return out

    def edge_lists(self, use_labels: bool = True) -> list[list[int]]:
        if not use_labels:
            return [list(mem) for mem in self.members]
        lab = self.labels
        return [[lab[j] for j in mem] for mem in self.members]

    def __repr__(self):
        return f"Hypergraph(N={self.N}, M={self.M}, S={self.arc_count})"


def _as_thresholds(thresholds, M: int) -> np.ndarray:
    t = np.asarray(thresholds, dtype=float)
    if t.ndim == 0:
        t = np.full(M, float(t))
    if t.shape != (M,):
        raise ThresholdOutOfRange(f"expected {M} thresholds, got shape {t.shape}")
    if M and not np.all((t > 0.0) & (t < 1.0)):
        raise ThresholdOutOfRange("thresholds must lie strictly inside (0, 1)")
    return t


def build_hypergraph(
    edge_member_lists: Sequence[Sequence[int]],
    thresholds: float | Sequence[float] = 0.5,
    nodes: Iterable[int] | None = None,
) -> Hypergraph:
    """Build a :class:`Hypergraph` from lists of external node ids.

    ``nodes`` may name extra (possibly isolated) node ids. External ids are
    sorted and mapped to dense ids ``0..N-1``.

    >>> H = build_hypergraph([[1, 2], [2, 3]], 0.5)
    >>> H.N, H.M, hyperdegree(H, H.node(2))
    (3, 2, 2)
    """
    edges = [list(mem) for mem in edge_member_lists]
    labels = set(nodes) if nodes is not None else set()
    for k, mem in enumerate(edges):
        if not mem:
            raise EmptyEdge(f"hyperedge {k} is empty")
        if len(set(mem)) != len(mem):
            raise DuplicateMember(f"hyperedge {k} repeats a node: {mem}")
        labels.update(mem)
    for lab in labels:
        if isinstance(lab, (bool, np.bool_)) or not isinstance(lab, (int, np.integer)) or lab < 0:
            raise UnknownNode(f"node ids must be non-negative integers, got {lab!r}")
    t = _as_thresholds(thresholds, len(edges))
    ordered = tuple(sorted(int(x) for x in labels))
    index = {lab: i for i, lab in enumerate(ordered)}
    members = tuple(tuple(index[x] for x in mem) for mem in edges)
    return _from_dense(members, len(ordered), t, ordered)


def _from_dense(members, n_nodes, thresholds, labels, edge_labels=()) -> Hypergraph:
    incident: list[list[int]] = [[] for _ in range(n_nodes)]
    for e, mem in enumerate(members):
        for j in mem:
            incident[j].append(e)
    return Hypergraph(
        members=tuple(members),
        incident=tuple(tuple(x) for x in incident),
        thresholds=np.array(thresholds, dtype=float),
        labels=tuple(labels),
        edge_labels=tuple(edge_labels),
    )


_DIRECTIVE = re.compile(r"^%threshold\s+(\S+)\s*$")


def load_hyperedge_list(stream: TextIO | str, threshold: float | None = None) -> Hypergraph:
    """Parse the hyperedge-list text format.

    One hyperedge per line of whitespace-separated node ids; ``#`` lines and
    blank lines are skipped; a ``%threshold <t>`` directive sets the uniform
    threshold. An explicit ``threshold`` argument overrides the directive.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    edges: list[list[int]] = []
    lines: list[int] = []
    header_t = None
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            match = _DIRECTIVE.match(line)
            if not match:
                raise ParseError(lineno, f"unknown directive {line!r}")
            try:
                header_t = float(match.group(1))
            except ValueError:
                raise ParseError(lineno, f"bad threshold {match.group(1)!r}") from None
            continue
        try:
            ids = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(lineno, f"non-integer node id in {line!r}") from None
        if any(x < 0 for x in ids):
            raise ParseError(lineno, "negative node id")
        if len(set(ids)) != len(ids):
            raise ParseError(lineno, f"repeated node id in {line!r}")
        edges.append(ids)
        lines.append(lineno)
    t = threshold if threshold is not None else header_t
    if t is None:
        t = 0.5
    return build_hypergraph(edges, t)


def write_hyperedge_list(H: Hypergraph, stream: TextIO, comment: str | None = None) -> None:
    """Write ``H`` in the hyperedge-list format (external labels).

    Only a uniform threshold can be expressed; mixed thresholds raise.
    Isolated nodes are not representable and are silently lost.
    """
    if comment:
        for line in comment.splitlines():
            stream.write(f"# {line}\n")
    if H.M:
        t = H.thresholds
        if not np.all(t == t[0]):
            raise ThresholdOutOfRange("file format only carries a uniform threshold")
        stream.write(f"%threshold {float(t[0])!r}\n")
    for mem in H.edge_lists():
        stream.write(" ".join(map(str, mem)) + "\n")


def hyperdegree(H: Hypergraph, i: int) -> int:
    H.check_node(i)
    return len(H.incident[i])


def _components(H: Hypergraph) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite incidence graph as (nodes, edges)."""
    seen_node = bytearray(H.N)
    seen_edge = bytearray(H.M)
    comps = []
    for start in range(H.N):
        if seen_node[start]:
            continue
        seen_node[start] = 1
        nodes, edges = [start], []
        queue = deque([start])
        while queue:
            j = queue.popleft()
            for e in H.incident[j]:
                if seen_edge[e]:
                    continue
                seen_edge[e] = 1
                edges.append(e)
                for k in H.members[e]:
                    if not seen_node[k]:
                        seen_node[k] = 1
                        nodes.append(k)
                        queue.append(k)
        comps.append((nodes, edges))
    return comps


def giant_component(H: Hypergraph) -> Hypergraph:
    """Sub-hypergraph on the largest bipartite component.

    Size counts nodes plus hyperedges; ties go to the component holding the
    smallest node id. Ids are relabeled densely; ``labels`` and
    ``edge_labels`` map back to the ids of ``H``'s external labels / edge ids.
    """
    if H.N == 0:
        return H
    comps = _components(H)
    # components are discovered in order of their minimum node id
    best = max(range(len(comps)), key=lambda c: (len(comps[c][0]) + len(comps[c][1]), -c))
    nodes, edges = comps[best]
    nodes.sort()
    edges.sort()
    remap = {old: new for new, old in enumerate(nodes)}
    members = tuple(tuple(remap[j] for j in H.members[e]) for e in edges)
    return _from_dense(
        members,
        len(nodes),
        H.thresholds[edges],
        [H.labels[j] for j in nodes],
        [H.edge_labels[e] for e in edges],
    )


def bipartite_ball(
    H: Hypergraph,
    nodes: Iterable[int] = (),
    edges: Iterable[int] = (),
    L: int = 0,
    node_ok: Sequence[bool] | None = None,
    edge_ok: Sequence[bool] | None = None,
) -> set[int]:
    """Nodes within ``L`` node->edge->node layers of the roots.

    Root nodes are included at layer 0; a root hyperedge contributes its
    members at layer 0. ``node_ok`` / ``edge_ok`` optionally restrict which
    elements the walk may pass through (roots are always kept).
    """
    if L < 0:
        raise ValueError("L must be non-negative")
    frontier = set()
    for i in nodes:
        if not 0 <= i < H.N:
            raise UnknownId(f"node id {i} out of range")
        frontier.add(i)
    for e in edges:
        if not 0 <= e < H.M:
            raise UnknownId(f"edge id {e} out of range")
        frontier.update(H.members[e])
    ball = set(frontier)
    seen_edges = set()
    for _ in range(L):
        nxt = set()
        for j in frontier:
            for e in H.incident[j]:
                if e in seen_edges or (edge_ok is not None and not edge_ok[e]):
                    continue
                seen_edges.add(e)
                for k in H.members[e]:
                    if k not in ball and (node_ok is None or node_ok[k]):
                        nxt.add(k)
        if not nxt:
            break
        ball |= nxt
        frontier = nxt
    return ball
