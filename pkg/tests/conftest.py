import numpy as np
import pytest

from hcitm.hypergraph import activation_count, build_hypergraph

# rows collected by test_acceptance and printed once at the end of the run
ACCEPTANCE_ROWS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_ROWS:
        terminalreporter.section("acceptance criteria")
        for row in ACCEPTANCE_ROWS:
            terminalreporter.write_line(row)


FIG1_EDGES = [[1, 2], [2, 3], [3, 6], [4, 5], [6, 7]]


@pytest.fixture
def fig1():
    return build_hypergraph(FIG1_EDGES, 0.5)


def fig2_hypergraph():
    """Node 0 ("i") with hyperdegree 5: three pair edges to a=1, b=2, c=3 and
    two larger high-threshold edges. a has two further pair edges, b and c
    one each. Returns (H, dense id of i)."""
    i, a, b, c = 0, 1, 2, 3
    edges = [[i, a], [i, b], [i, c], [a, 10], [a, 11], [b, 12], [c, 13], [i, 20, 21], [i, 22, 23, 24]]
    t = [0.5] * 7 + [0.8, 0.8]
    H = build_hypergraph(edges, t)
    return H, H.node(i)


def random_hypergraph(rng, n_nodes, n_edges, max_size=4, thresholds=(0.5, 0.6, 0.8), isolated=True):
    edges = []
    for _ in range(n_edges):
        size = int(rng.integers(1, max_size + 1))
        size = min(size, n_nodes)
        edges.append(rng.choice(n_nodes, size=size, replace=False).tolist())
    t = rng.choice(thresholds, size=len(edges)).tolist()
    nodes = range(n_nodes) if isolated else None
    return build_hypergraph(edges, t, nodes=nodes)


def random_tree(rng, n_max=50, thresholds=(0.5, 0.6, 0.8)):
    """Random hypergraph whose bipartite incidence graph is a tree: each new
    edge joins exactly one existing node to some fresh nodes."""
    edges = [[0] + list(range(1, 1 + int(rng.integers(0, 3))))]
    n = len(edges[0])
    while n < n_max:
        anchor = int(rng.integers(0, n))
        k = int(rng.integers(0, 4))
        if n + k > n_max:
            break
        edges.append([anchor] + list(range(n, n + k)))
        n += k
        if rng.random() < 0.05:
            break
    t = rng.choice(thresholds, size=len(edges)).tolist()
    return build_hypergraph(edges, t, nodes=range(n))


def naive_cascade(members, m, n_nodes, seeds):
    """Direct synchronous simulation; returns (node_active, edge_active)."""
    node = np.zeros(n_nodes, dtype=bool)
    node[list(seeds)] = True
    edge = np.zeros(len(members), dtype=bool)
    while True:
        fire = [e for e, mem in enumerate(members)
                if not edge[e] and mem and sum(node[j] for j in mem) >= m[e]]
        if not fire:
            return node, edge
        edge[fire] = True
        new = {j for e in fire for j in members[e] if not node[j]}
        node[list(new)] = True


def async_cascade(members, m, n_nodes, seeds, rng):
    """One random element at a time until no rule applies."""
    node = np.zeros(n_nodes, dtype=bool)
    node[list(seeds)] = True
    edge = np.zeros(len(members), dtype=bool)
    while True:
        moves = [("e", e) for e, mem in enumerate(members) if not edge[e] and sum(node[j] for j in mem) >= m[e]]
        moves += [("n", j) for e, mem in enumerate(members) if edge[e] for j in mem if not node[j]]
        if not moves:
            return node, edge
        kind, x = moves[int(rng.integers(len(moves)))]
        if kind == "e":
            edge[x] = True
        else:
            node[x] = True


def m_of(t, size):
    return activation_count(t, size)
