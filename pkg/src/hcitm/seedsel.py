"""Seed selection: adaptive HCI-TM and the baseline heuristics.

Every selector adds seeds one at a time, runs the cascade after each
addition and stops as soon as the active fraction Q reaches ``a_r``. Static
selectors (HHD, NP, PageRank, RA) walk a ranking fixed up front and still
consume nodes that became active in the meantime; adaptive selectors
(HCI-TM, HHDA, NPA) rescore on the masked hypergraph and only ever seed
inactive nodes. Ties always go to the lowest node id.
"""

from __future__ import annotations

import csv
import heapq
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, TextIO

import numpy as np
import scipy.sparse as sp

from .cascade import ActivationTracker
from .errors import NoConvergence
from .hci import HciScorer
from .hypergraph import Hypergraph, bipartite_ball

__all__ = [
    "SelectionConfig",
    "SelectionResult",
    "SELECTORS",
    "select",
    "hci_tm_select",
    "hhd_select",
    "hhda_select",
    "np_select",
    "npa_select",
    "pagerank_scores",
    "pagerank_select",
    "ra_select",
    "result_to_dict",
    "write_history_csv",
]


@dataclass(frozen=True)
class SelectionConfig:
    a_r: float = 0.9
    hci_order: int = 2
    rng_seed: int = 0
    damping: float = 0.85
    pagerank_tol: float = 1e-10
    pagerank_max_iter: int = 200

    def __post_init__(self):
        if not 0.0 < self.a_r <= 1.0:
            raise ValueError(f"a_r must lie in (0, 1], got {self.a_r}")
        if self.hci_order < 0:
            raise ValueError("hci_order must be non-negative")


@dataclass
class SelectionResult:
    algorithm: str
    seeds: list[int]
    Q: float
    Q_history: list[tuple[int, float, float]]
    elapsed: float
    exhausted: bool
    config: SelectionConfig
    # score of each seed at the moment it was picked (adaptive selectors)
    picked_scores: list[int] = field(default_factory=list)
    # HCI_0/1/2 of each seed at selection time (HCI-TM with trace=True)
    hci_trace: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def q(self) -> float:
        return self.Q_history[-1][1] if self.Q_history else 0.0


class _OldInactive:
    """Mask of elements that were inactive before the last round."""

    __slots__ = ("active", "fresh")

    def __init__(self, active, fresh):
        self.active = active
        self.fresh = fresh

    def __getitem__(self, k):
        return not self.active[k] or k in self.fresh


def _finish(name, H, cfg, tracker, seeds, history, t0, **extra) -> SelectionResult:
    return SelectionResult(
        algorithm=name,
        seeds=seeds,
        Q=tracker.Q,
        Q_history=history,
        elapsed=time.perf_counter() - t0,
        exhausted=tracker.Q < cfg.a_r,
        config=cfg,
        **extra,
    )


def _static(name: str, H: Hypergraph, cfg: SelectionConfig, ranking) -> SelectionResult:
    t0 = time.perf_counter()
    tracker = ActivationTracker(H)
    seeds, history = [], []
    for i in ranking:
        if tracker.Q >= cfg.a_r:
            break
        seeds.append(int(i))
        tracker.activate([int(i)])
        history.append((len(seeds), len(seeds) / H.N, tracker.Q))
    return _finish(name, H, cfg, tracker, seeds, history, t0)


def _rank(scores) -> list[int]:
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def _adaptive(
    name: str,
    H: Hypergraph,
    cfg: SelectionConfig,
    make_score: Callable[[ActivationTracker, bytearray], Callable[[int], int]],
    radius: int,
    observer=None,
    on_pick=None,
    t0: float | None = None,
) -> SelectionResult:
    t0 = time.perf_counter() if t0 is None else t0
    tracker = ActivationTracker(H)
    seed_mask = bytearray(H.N)
    score = make_score(tracker, seed_mask)
    active = tracker.node_active
    scores = [score(i) for i in range(H.N)]
    heap = [(-s, i) for i, s in enumerate(scores)]
    heapq.heapify(heap)
    seeds, history, picked = [], [], []
    while tracker.Q < cfg.a_r:
        while heap:
            neg, i = heapq.heappop(heap)
            if not active[i] and -neg == scores[i]:
                break
        else:
            break
        picked.append(scores[i])
        if on_pick is not None:
            on_pick(i)
        seeds.append(i)
        seed_mask[i] = 1
        new_nodes, new_edges, _ = tracker.activate([i])
        for x in new_nodes:
            scores[x] = 0
        fresh_nodes, fresh_edges = set(new_nodes), set(new_edges)
        ball = bipartite_ball(
            H,
            new_nodes,
            (),
            radius,
            node_ok=_OldInactive(active, fresh_nodes),
            edge_ok=_OldInactive(tracker.edge_active, fresh_edges),
        )
        for v in ball:
            if active[v]:
                continue
            s = score(v)
            if s != scores[v]:
                scores[v] = s
                heapq.heappush(heap, (-s, v))
        history.append((len(seeds), len(seeds) / H.N, tracker.Q))
        if observer is not None:
            observer(tracker, seed_mask, scores)
    return _finish(name, H, cfg, tracker, seeds, history, t0, picked_scores=picked)


def hci_tm_select(
    H: Hypergraph, cfg: SelectionConfig = SelectionConfig(), observer=None, trace: bool = False
) -> SelectionResult:
    """Greedy max-HCI_n seeding with local rescoring.

    After each round only nodes within ceil(n/2) layers of the newly
    activated elements (walking through structure that was still inactive
    before the round) are rescored; nothing further away can change.

    ``observer(tracker, seed_mask, scores)`` is called after every round.
    With ``trace=True`` the HCI_0/1/2 of each seed at selection time are
    kept in ``hci_trace``.
    """
    t0 = time.perf_counter()
    n = cfg.hci_order
    scorers = {}

    def make_score(tracker, seed_mask):
        for order in {0, 1, 2, n}:
            scorers[order] = HciScorer(
                H, tracker.node_active, tracker.edge_active, tracker.count, seed_mask, order
            )
        return scorers[n].score

    hci_trace = []
    on_pick = None
    if trace:
        def on_pick(i):
            hci_trace.append(tuple(scorers[k].score(i) for k in (0, 1, 2)))

    res = _adaptive(f"hci{n}tm", H, cfg, make_score, math.ceil(n / 2), observer, on_pick, t0)
    res.hci_trace = hci_trace
    res.elapsed = time.perf_counter() - t0
    return res


def hhd_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    return _static("hhd", H, cfg, _rank(H.degrees.tolist()))


def _masked_degree(tracker: ActivationTracker, seed_mask):
    H, act, edge_act = tracker.H, tracker.node_active, tracker.edge_active

    def score(i):
        if act[i]:
            return 0
        return sum(1 for e in H.incident[i] if not edge_act[e])

    return score


def hhda_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig(), observer=None) -> SelectionResult:
    return _adaptive("hhda", H, cfg, _masked_degree, 1, observer)


def neighbor_counts(H: Hypergraph) -> list[int]:
    return [len(H.neighbors(i)) for i in range(H.N)]


def np_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    return _static("np", H, cfg, _rank(neighbor_counts(H)))


def _masked_neighbors(tracker: ActivationTracker, seed_mask):
    H, act, edge_act = tracker.H, tracker.node_active, tracker.edge_active

    def score(i):
        if act[i]:
            return 0
        seen = set()
        for e in H.incident[i]:
            if not edge_act[e]:
                seen.update(j for j in H.members[e] if not act[j])
        seen.discard(i)
        return len(seen)

    return score


def npa_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig(), observer=None) -> SelectionResult:
    return _adaptive("npa", H, cfg, _masked_neighbors, 1, observer)


def pagerank_scores(
    H: Hypergraph, d: float = 0.85, tol: float = 1e-10, max_iter: int = 200
) -> np.ndarray:
    """Hypergraph PageRank by power iteration.

    Node j spreads its rank over every (hyperedge, co-member) pair, i.e. a
    co-member sharing two hyperedges with j gets two shares, so that the
    L(j) = sum_e (N_e - 1) normaliser conserves total rank. Nodes with
    L(j) = 0 spread their rank uniformly over all nodes.
    """
    if not 0.0 < d < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    N = H.N
    if N == 0:
        return np.zeros(0)
    rows = np.fromiter((j for mem in H.members for j in mem), dtype=np.int64, count=H.arc_count)
    cols = np.repeat(np.arange(H.M), H.sizes)
    B = sp.csr_matrix((np.ones(H.arc_count), (rows, cols)), shape=(N, H.M))
    A = (B @ B.T).tolil()
    A.setdiag(0)
    A = A.tocsr()
    A.eliminate_zeros()
    L = np.asarray(A.sum(axis=0)).ravel()
    dangling = L == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, L))
    W = A @ sp.diags(inv)
    pr = np.full(N, 1.0 / N)
    for _ in range(max_iter):
        nxt = d * (W @ pr + pr[dangling].sum() / N) + (1.0 - d) / N
        delta = np.abs(nxt - pr).max()
        pr = nxt
        if delta < tol:
            return pr
    raise NoConvergence(f"PageRank did not reach tol={tol} in {max_iter} iterations")


def pagerank_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    pr = pagerank_scores(H, cfg.damping, cfg.pagerank_tol, cfg.pagerank_max_iter)
    # float noise must not decide ties between symmetric nodes
    return _static("pagerank", H, cfg, _rank(np.round(pr, 12).tolist()))


def ra_select(H: Hypergraph, cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    order = np.random.default_rng(cfg.rng_seed).permutation(H.N)
    return _static("ra", H, cfg, order.tolist())


def _hci_fixed(order):
    def run(H, cfg=SelectionConfig()):
        return hci_tm_select(H, replace(cfg, hci_order=order))

    return run


SELECTORS: dict[str, Callable[..., SelectionResult]] = {
    "hcitm": hci_tm_select,
    "hci0tm": _hci_fixed(0),
    "hci1tm": _hci_fixed(1),
    "hci2tm": _hci_fixed(2),
    "hhd": hhd_select,
    "hhda": hhda_select,
    "np": np_select,
    "npa": npa_select,
    "pagerank": pagerank_select,
    "ra": ra_select,
}


def select(name: str, H: Hypergraph, cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    try:
        fn = SELECTORS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(SELECTORS)}") from None
    return fn(H, cfg)


def result_to_dict(H: Hypergraph, res: SelectionResult, timing: bool = True) -> dict:
    """JSON-ready record; seeds are reported as external labels."""
    out = {
        "algorithm": res.algorithm,
        "config": asdict(res.config),
        "rng_seed": res.config.rng_seed,
        "N": H.N,
        "M": H.M,
        "seeds": [H.labels[i] for i in res.seeds],
        "q": res.q,
        "Q": res.Q,
        "exhausted": res.exhausted,
        "Q_history": [list(row) for row in res.Q_history],
    }
    if res.hci_trace:
        out["hci_trace"] = [list(row) for row in res.hci_trace]
    if timing:
        out["elapsed_ms"] = res.elapsed * 1000.0
    return out


def write_history_csv(res: SelectionResult, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["seed_count", "q", "Q"])
    for count, q, Q in res.Q_history:
        w.writerow([count, repr(q), repr(Q)])
