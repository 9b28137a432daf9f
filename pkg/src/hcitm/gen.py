"""Random hypergraph generators (ER, scale-free, K-uniform).

All generators are pure functions of their :class:`GeneratorSpec`; the
randomness comes from ``numpy.random.default_rng(spec.rng_seed)``. Node ids
are ``0..N-1`` and isolated nodes are kept, so realized N always equals the
requested N. Hyperedges that end up empty are dropped and counted in the
metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidProbability, KTooLarge
from .hypergraph import Hypergraph, build_hypergraph, write_hyperedge_list

__all__ = [
    "GeneratorSpec",
    "default_edge_count",
    "gen_er",
    "gen_sf",
    "gen_kuniform",
    "generate",
    "write_generated",
]

# hyperedge-to-node ratios used for the synthetic experiments
EDGE_RATIO = {"ER": 0.3, "SF": 0.5, "KUF": 0.5}


def default_edge_count(kind: str, N: int) -> int:
    return max(1, round(EDGE_RATIO[kind] * N))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    N: int
    param: float
    M: int | None = None
    threshold: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in EDGE_RATIO:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.M is None:
            object.__setattr__(self, "M", default_edge_count(kind, self.N))
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be at least 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if kind == "ER" and self.param <= 0:
            raise ValueError("ER mean hyperdegree must be positive")
        if kind == "SF" and self.param <= 1:
            raise ValueError("SF exponent must exceed 1")
        if kind == "KUF" and (self.param < 1 or int(self.param) != self.param):
            raise ValueError("K must be a positive integer")


def _assemble(spec: GeneratorSpec, edge_ids: np.ndarray, node_ids: np.ndarray) -> Hypergraph:
    """Group (edge, node) incidences into member lists; empty edges vanish."""
    order = np.lexsort((node_ids, edge_ids))
    edge_ids, node_ids = edge_ids[order], node_ids[order]
    cuts = np.flatnonzero(np.diff(edge_ids)) + 1
    groups = np.split(node_ids, cuts) if len(node_ids) else []
    edges = [g.tolist() for g in groups]
    return build_hypergraph(edges, spec.threshold, nodes=range(spec.N))


def gen_er(spec: GeneratorSpec) -> Hypergraph:
    """Bipartite Erdős–Rényi: each (node, edge) pair present with p = <k>/M."""
    p = spec.param / spec.M
    if not 0.0 < p <= 1.0:
        raise InvalidProbability(f"incidence probability {p} outside (0, 1]")
    rng = np.random.default_rng(spec.rng_seed)
    total = spec.N * spec.M
    count = rng.binomial(total, p)
    # a uniform count-subset of all pairs is the same law as independent pairs
    pos = rng.choice(total, size=count, replace=False)
    return _assemble(spec, pos // spec.N, pos % spec.N)


def gen_sf(spec: GeneratorSpec) -> Hypergraph:
    """Power-law node hyperdegrees on [1, ceil(sqrt N)], stubs to random edges."""
    rng = np.random.default_rng(spec.rng_seed)
    kmax = max(1, math.ceil(math.sqrt(spec.N)))
    ks = np.arange(1, kmax + 1)
    prob = ks ** (-float(spec.param))
    prob /= prob.sum()
    degrees = rng.choice(ks, size=spec.N, p=prob)
    nodes = np.repeat(np.arange(spec.N), degrees)
    edges = rng.integers(spec.M, size=nodes.size)
    pairs = np.unique(edges.astype(np.int64) * spec.N + nodes)
    return _assemble(spec, pairs // spec.N, pairs % spec.N)


def gen_kuniform(spec: GeneratorSpec) -> Hypergraph:
    """M hyperedges of K distinct uniformly drawn nodes each."""
    K = int(spec.param)
    if K > spec.N:
        raise KTooLarge(f"K={K} exceeds N={spec.N}")
    rng = np.random.default_rng(spec.rng_seed)
    rows = rng.integers(spec.N, size=(spec.M, K))
    while True:
        srt = np.sort(rows, axis=1)
        bad = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1)) if K > 1 else []
        if len(bad) == 0:
            break
        rows[bad] = rng.integers(spec.N, size=(len(bad), K))
    edges = np.repeat(np.arange(spec.M), K)
    return _assemble(spec, edges, rows.ravel())


_GENERATORS = {"ER": gen_er, "SF": gen_sf, "KUF": gen_kuniform}


def generate(spec: GeneratorSpec) -> tuple[Hypergraph, dict]:
    """Generate and return ``(H, metadata)``."""
    H = _GENERATORS[spec.kind](spec)
    meta = {
        "spec": asdict(spec),
        "realized_N": H.N,
        "realized_M": H.M,
        "dropped_edges": spec.M - H.M,
        "rng_seed": spec.rng_seed,
    }
    return H, meta


def write_generated(spec: GeneratorSpec, path: str | Path) -> tuple[Hypergraph, dict]:
    """Write the hyperedge list to ``path`` and metadata to ``path.json``."""
    path = Path(path)
    H, meta = generate(spec)
    with path.open("w", encoding="utf-8") as fh:
        write_hyperedge_list(H, fh, comment=json.dumps(meta["spec"], sort_keys=True))
    with path.with_suffix(path.suffix + ".json").open("w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return H, meta
