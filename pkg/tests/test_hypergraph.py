import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hcitm.errors import DuplicateMember, EmptyEdge, ParseError, ThresholdOutOfRange, UnknownId, UnknownNode
from hcitm.gen import GeneratorSpec, gen_er, gen_kuniform
from hcitm.hypergraph import (
    activation_count,
    bipartite_ball,
    build_hypergraph,
    giant_component,
    hyperdegree,
    load_hyperedge_list,
    write_hyperedge_list,
)


def test_build_basic():
    H = build_hypergraph([[1, 2], [2, 3]], 0.5)
    assert (H.N, H.M) == (3, 2)
    assert H.labels == (1, 2, 3)
    assert hyperdegree(H, H.node(2)) == 2


def test_build_errors():
    with pytest.raises(DuplicateMember):
        build_hypergraph([[1, 1]])
    with pytest.raises(EmptyEdge):
        build_hypergraph([[1, 2], []])
    with pytest.raises(ThresholdOutOfRange):
        build_hypergraph([[1, 2]], 1.0)
    with pytest.raises(ThresholdOutOfRange):
        build_hypergraph([[1, 2]], 0.0)
    with pytest.raises(UnknownNode):
        build_hypergraph([[-1, 2]])


def test_m_example():
    H = build_hypergraph([[1, 2, 3]], 0.6)
    assert H.m[0] == 2


@pytest.mark.parametrize("t", [0.5, 0.6, 0.8])
@pytest.mark.parametrize("size", range(1, 11))
def test_m_table_exact(t, size):
    # exact rational ceiling as the oracle
    expected = max(1, math.ceil(Fraction(str(t)) * size))
    m = activation_count(t, size)
    assert m == expected
    assert 1 <= m <= size
    assert Fraction(m, size) >= Fraction(str(t)) > Fraction(m - 1, size)


@given(st.floats(0.01, 0.99), st.integers(1, 200))
def test_m_unique_integer(t, size):
    m = activation_count(t, size)
    assert 1 <= m <= size
    assert m / size >= t - 1e-9
    assert (m - 1) / size < t


def test_incidence_symmetry_and_arc_count():
    H = gen_er(GeneratorSpec("ER", 300, 3, M=90, rng_seed=1))
    for e, mem in enumerate(H.members):
        for j in mem:
            assert e in H.incident[j]
    for j, inc in enumerate(H.incident):
        for e in inc:
            assert j in H.members[e]
    assert H.degrees.sum() == H.sizes.sum() == H.arc_count


def test_load_examples():
    H = load_hyperedge_list("1 2\n2 3\n", threshold=0.5)
    assert (H.N, H.M) == (3, 2)
    H = load_hyperedge_list("# comment\n\n1 2 3\n")
    assert (H.N, H.M) == (3, 1)
    H = load_hyperedge_list("%threshold 0.8\n1 2 3\n")
    assert H.thresholds[0] == 0.8 and H.m[0] == 3
    H = load_hyperedge_list("%threshold 0.8\n1 2 3\n", threshold=0.3)
    assert H.thresholds[0] == 0.3


def test_load_parse_errors():
    with pytest.raises(ParseError) as err:
        load_hyperedge_list("1 2\n1 x\n")
    assert err.value.lineno == 2
    with pytest.raises(ParseError):
        load_hyperedge_list("%weird 3\n")
    with pytest.raises(ParseError):
        load_hyperedge_list("1 1\n")


def test_write_load_round_trip():
    H = gen_er(GeneratorSpec("ER", 400, 3, rng_seed=5))
    buf = io.StringIO()
    write_hyperedge_list(H, buf, comment="generated")
    H2 = load_hyperedge_list(io.StringIO(buf.getvalue()))
    # isolated nodes are not representable in the file format
    used = sorted({lab for mem in H.edge_lists() for lab in mem})
    assert list(H2.labels) == used
    assert [sorted(x) for x in H2.edge_lists()] == [sorted(x) for x in H.edge_lists()]
    assert np.array_equal(H2.thresholds, H.thresholds)


def test_hyperdegree_examples(fig1):
    assert hyperdegree(fig1, fig1.node(3)) == 2
    H = build_hypergraph([[1, 2]], nodes=[9])
    assert hyperdegree(H, H.node(9)) == 0
    with pytest.raises(UnknownNode):
        hyperdegree(H, 7)
    K = gen_kuniform(GeneratorSpec("KUF", 200, 4, M=70, rng_seed=2))
    assert sum(hyperdegree(K, i) for i in range(K.N)) == 4 * K.M


def test_giant_examples():
    H = build_hypergraph([[1, 2], [3, 4, 5]])
    G = giant_component(H)
    assert G.labels == (3, 4, 5) and G.M == 1
    assert G.edge_labels == (1,)
    H = build_hypergraph([[1, 2], [2, 3], [3, 4]])
    G = giant_component(H)
    assert G.labels == H.labels and G.edge_lists() == H.edge_lists()
    empty = build_hypergraph([])
    assert giant_component(empty).N == 0


def test_giant_tie_break_smallest_node():
    H = build_hypergraph([[5, 6], [1, 2]])
    assert giant_component(H).labels == (1, 2)


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def test_giant_matches_union_find():
    H = gen_er(GeneratorSpec("ER", 1000, 3, M=300, rng_seed=11))
    # bipartite vertices: nodes 0..N-1, edges N..N+M-1
    uf = UnionFind(H.N + H.M)
    for e, mem in enumerate(H.members):
        for j in mem:
            uf.union(j, H.N + e)
    groups = {}
    for v in range(H.N + H.M):
        groups.setdefault(uf.find(v), []).append(v)
    best = max(groups.values(), key=lambda g: (len(g), -min(g)))
    nodes = [v for v in best if v < H.N]
    edges = [v - H.N for v in best if v >= H.N]
    G = giant_component(H)
    assert list(G.labels) == [H.labels[j] for j in nodes]
    assert list(G.edge_labels) == edges


def test_giant_connected_and_maximal():
    H = gen_er(GeneratorSpec("ER", 500, 2, rng_seed=4))
    G = giant_component(H)
    assert bipartite_ball(G, [0], (), G.N) == set(range(G.N))
    inside = set(G.labels)
    for mem in H.edge_lists():
        assert set(mem) <= inside or not (set(mem) & inside)


def test_ball_examples(fig1):
    n3 = fig1.node(3)
    assert bipartite_ball(fig1, [n3], (), 0) == {n3}
    got = {fig1.labels[j] for j in bipartite_ball(fig1, [n3], (), 1)}
    assert got == {2, 3, 6}
    e2 = 1
    got = {fig1.labels[j] for j in bipartite_ball(fig1, (), [e2], 1)}
    assert got == {1, 2, 3, 6}
    with pytest.raises(UnknownId):
        bipartite_ball(fig1, [99], (), 1)
    with pytest.raises(UnknownId):
        bipartite_ball(fig1, (), [99], 1)
