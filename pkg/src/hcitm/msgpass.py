"""Cavity message passing on node <-> hyperedge arcs.

Every incidence pair (i, e) carries two binary messages: ``v_ne`` (node i is
active when e is virtually removed) and ``v_en`` (e is active when i is
virtually removed). For binary messages the edge update "some m-subset of
the other members is all active" is evaluated as a count, which is exactly
equivalent to the subset-product form and avoids enumerating C(N_e - 1, m)
subsets. :func:`subset_product_message` keeps the product form for checking.
"""

from __future__ import annotations

import csv
import weakref
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Sequence, TextIO

import numpy as np

from .cascade import CascadeState, _check_seeds
from .errors import NonConvergence, NotAFixedPoint, NotIncident, SameNode
from .hypergraph import Hypergraph

__all__ = [
    "ArcIndex",
    "MessageState",
    "arc_index",
    "init_messages",
    "update_step",
    "fixed_point",
    "final_state",
    "message_norm",
    "messages_from_activation",
    "subset_product_message",
    "indicator_a",
    "indicator_b",
    "indicator_M",
    "indicator_I",
    "write_messages_csv",
]


class ArcIndex:
    """Arc numbering: arcs are listed edge by edge, in member order."""

    def __init__(self, H: Hypergraph):
        self.S = H.arc_count
        self.arc_edge = np.repeat(np.arange(H.M, dtype=np.int64), H.sizes)
        self.arc_node = np.fromiter(
            (j for mem in H.members for j in mem), dtype=np.int64, count=self.S
        )
        self._lookup = {
            (int(i), int(e)): a for a, (i, e) in enumerate(zip(self.arc_node, self.arc_edge))
        }

    def arc(self, i: int, e: int) -> int:
        try:
            return self._lookup[(i, e)]
        except KeyError:
            raise NotIncident(f"node {i} is not a member of edge {e}") from None

    def __len__(self):
        return self.S


_ARCS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def arc_index(H: Hypergraph) -> ArcIndex:
    idx = _ARCS.get(H)
    if idx is None:
        idx = _ARCS[H] = ArcIndex(H)
    return idx


@dataclass
class MessageState:
    seeds: np.ndarray
    v_ne: np.ndarray  # node -> edge, per arc
    v_en: np.ndarray  # edge -> node, per arc
    t: int = 0

    def __eq__(self, other):
        return (
            isinstance(other, MessageState)
            and np.array_equal(self.v_ne, other.v_ne)
            and np.array_equal(self.v_en, other.v_en)
        )


def init_messages(H: Hypergraph, seeds) -> MessageState:
    seeds = _check_seeds(H, seeds)
    arcs = arc_index(H)
    return MessageState(
        seeds=seeds,
        v_ne=seeds[arcs.arc_node].astype(np.int8),
        v_en=np.zeros(arcs.S, dtype=np.int8),
    )


def subset_product_message(incoming: Sequence[float], m: int) -> float:
    """``1 - prod over m-subsets P of (1 - prod_{p in P} v_p)``.

    ``incoming`` holds the messages of the other members of the edge.
    """
    out = 1.0
    for subset in combinations(incoming, m):
        out *= 1.0 - float(np.prod(subset))
    return 1.0 - out


def _edge_to_node_subset(H: Hypergraph, arcs: ArcIndex, v_ne: np.ndarray) -> np.ndarray:
    out = np.zeros(arcs.S, dtype=np.int8)
    a = 0
    for e, mem in enumerate(H.members):
        base = a
        vals = v_ne[base : base + len(mem)].tolist()
        for k in range(len(mem)):
            others = vals[:k] + vals[k + 1 :]
            out[a] = round(subset_product_message(others, int(H.m[e])))
            a += 1
    return out


def update_step(H: Hypergraph, state: MessageState, form: str = "count") -> MessageState:
    """One Jacobi sweep of the cavity equations over both arc directions.

    ``form="subset"`` evaluates the edge -> node messages with the explicit
    product over m-subsets (slow; for small edges only).
    """
    arcs = arc_index(H)
    n_arc = state.seeds[arcs.arc_node]
    # node -> edge: seed, or some other incident edge fires towards the node
    incoming = np.bincount(arcs.arc_node, weights=state.v_en, minlength=H.N)
    others = incoming[arcs.arc_node] - state.v_en
    v_ne = (n_arc | (others > 0)).astype(np.int8)
    if form == "count":
        # edge -> node: at least m_e of the other members are active
        active = np.bincount(arcs.arc_edge, weights=state.v_ne, minlength=H.M)
        rest = active[arcs.arc_edge] - state.v_ne
        v_en = (rest >= H.m[arcs.arc_edge]).astype(np.int8)
    elif form == "subset":
        v_en = _edge_to_node_subset(H, arcs, state.v_ne)
    else:
        raise ValueError(f"unknown form {form!r}")
    return MessageState(state.seeds, v_ne, v_en, state.t + 1)


def fixed_point(H: Hypergraph, seeds, max_iter: int | None = None) -> MessageState:
    """Iterate :func:`update_step` from the seed state until nothing changes."""
    state = init_messages(H, seeds)
    limit = max_iter if max_iter is not None else 2 * (H.N + H.M) + 2
    for _ in range(limit + 1):
        nxt = update_step(H, state)
        if nxt == state:
            return state
        state = nxt
    raise NonConvergence(f"no fixed point after {limit} sweeps")


def final_state(H: Hypergraph, fp: MessageState, seeds=None) -> CascadeState:
    """Node and edge activity implied by a fixed point."""
    seeds = fp.seeds if seeds is None else _check_seeds(H, seeds)
    if not np.array_equal(seeds, fp.seeds):
        fp = replace(fp, seeds=seeds)
    if update_step(H, fp) != fp:
        raise NotAFixedPoint("message state is not a fixed point")
    arcs = arc_index(H)
    fired = np.bincount(arcs.arc_node, weights=fp.v_en, minlength=H.N)
    node_active = seeds | (fired > 0)
    active = np.bincount(arcs.arc_edge, weights=fp.v_ne, minlength=H.M)
    edge_active = active >= H.m
    return CascadeState(node_active, edge_active, steps=fp.t)


def message_norm(fp: MessageState) -> float:
    return float(fp.v_ne.sum() + fp.v_en.sum())


def messages_from_activation(H: Hypergraph, state: CascadeState, seeds=None) -> MessageState:
    """Messages implied by an activation snapshot.

    ``v_ne`` is the activity of the node; ``v_en`` is 1 when the edge is
    active or the rest of its members already meet its activation count.
    Seeds are treated as active.
    """
    arcs = arc_index(H)
    act = state.node_active.copy()
    if seeds is not None:
        seeds = _check_seeds(H, seeds)
        act |= seeds
    else:
        seeds = np.zeros(H.N, dtype=bool)
    v_ne = act[arcs.arc_node].astype(np.int8)
    count = np.bincount(arcs.arc_edge, weights=v_ne, minlength=H.M)
    rest = count[arcs.arc_edge] - v_ne
    v_en = (state.edge_active[arcs.arc_edge] | (rest >= H.m[arcs.arc_edge])).astype(np.int8)
    return MessageState(seeds, v_ne, v_en)


def indicator_a(H: Hypergraph, state: MessageState, e_beta: int, i: int, e_gamma: int) -> int:
    """Active hyperedges of ``i`` other than ``e_beta`` and ``e_gamma``."""
    arcs = arc_index(H)
    arcs.arc(i, e_beta)
    arcs.arc(i, e_gamma)
    if e_beta == e_gamma:
        raise NotIncident("e_beta and e_gamma must differ")
    return int(
        sum(state.v_en[arcs.arc(i, e)] for e in H.incident[i] if e != e_beta and e != e_gamma)
    )


def indicator_b(H: Hypergraph, state: MessageState, j: int, e_gamma: int, i: int) -> int:
    """Active members of ``e_gamma`` other than ``i`` and ``j``."""
    arcs = arc_index(H)
    arcs.arc(i, e_gamma)
    arcs.arc(j, e_gamma)
    if i == j:
        raise SameNode("i and j must differ")
    return int(sum(state.v_ne[arcs.arc(p, e_gamma)] for p in H.members[e_gamma] if p != i and p != j))


def indicator_M(H: Hypergraph, state: MessageState, e_beta: int, i: int, e_gamma: int) -> int:
    """1 when no other hyperedge already fires towards ``i``.

    The non-seed factor is left to the caller.
    """
    return int(indicator_a(H, state, e_beta, i, e_gamma) == 0)


def indicator_I(H: Hypergraph, state: MessageState, j: int, e_gamma: int, i: int) -> int:
    """1 when ``e_gamma`` is one activation short, not counting ``i``/``j``."""
    return int(indicator_b(H, state, j, e_gamma, i) == int(H.m[e_gamma]) - 1)


def write_messages_csv(H: Hypergraph, state: MessageState, stream: TextIO) -> None:
    """Dump as ``kind,source,target,value`` rows (external node labels)."""
    arcs = arc_index(H)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["kind", "source", "target", "value"])
    for a in range(arcs.S):
        i, e = H.labels[arcs.arc_node[a]], H.edge_labels[arcs.arc_edge[a]]
        w.writerow(["node_to_edge", i, e, int(state.v_ne[a])])
    for a in range(arcs.S):
        i, e = H.labels[arcs.arc_node[a]], H.edge_labels[arcs.arc_edge[a]]
        w.writerow(["edge_to_node", e, i, int(state.v_en[a])])
