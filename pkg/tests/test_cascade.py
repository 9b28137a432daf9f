import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import async_cascade, naive_cascade, random_hypergraph
from hcitm.cascade import (
    ActivationTracker,
    CascadeState,
    activation_fraction,
    residual_requirement,
    run_cascade,
    seed_vector,
    write_trace_csv,
)
from hcitm.errors import EdgeAlreadyActive, SizeMismatch
from hcitm.hypergraph import build_hypergraph


def labelled_trace(H, res):
    out = []
    for t, ids in res.final.trace:
        if t % 2 == 0:
            out.append((t, {H.labels[i] for i in ids}))
        else:
            out.append((t, {f"e{e + 1}" for e in ids}))
    return out


def test_fig1_trace(fig1):
    res = run_cascade(fig1, seed_vector(fig1, fig1.nodes([3])))
    assert labelled_trace(fig1, res) == [
        (0, {3}),
        (1, {"e2", "e3"}),
        (2, {2, 6}),
        (3, {"e1", "e5"}),
        (4, {1, 7}),
    ]
    assert res.final.steps == 4
    assert res.Q == pytest.approx(5 / 7)
    assert activation_fraction(res) == pytest.approx(5 / 7)


def test_trivial_seeds(fig1):
    res = run_cascade(fig1, seed_vector(fig1))
    assert res.Q == 0 and res.final.trace == []
    res = run_cascade(fig1, np.ones(fig1.N, dtype=bool))
    assert res.Q == 1
    assert [e for t, ids in res.final.trace if t == 1 for e in ids] == list(range(fig1.M))


def test_two_seeds_cover_fig1(fig1):
    res = run_cascade(fig1, seed_vector(fig1, fig1.nodes([3, 4])))
    assert res.Q == 1


def test_size_mismatch(fig1):
    with pytest.raises(SizeMismatch):
        run_cascade(fig1, np.zeros(3, dtype=bool))


def test_residual_requirement(fig1):
    st0 = CascadeState.empty(fig1)
    assert residual_requirement(fig1, st0, 1) == 1
    H = build_hypergraph([[1, 2, 3]], 0.6)
    state = CascadeState.empty(H)
    state.node_active[0] = True
    assert residual_requirement(H, state, 0) == 1
    state.node_active[1] = True
    assert residual_requirement(H, state, 0) == 0
    state.edge_active[0] = True
    with pytest.raises(EdgeAlreadyActive):
        residual_requirement(H, state, 0)


def test_trace_csv(fig1):
    res = run_cascade(fig1, seed_vector(fig1, fig1.nodes([3])))
    buf = io.StringIO()
    write_trace_csv(fig1, res.final, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,kind,id"
    assert lines[1] == "0,node,3"
    assert len(lines) == 1 + 9


def _random_instance(rng):
    N = int(rng.integers(2, 51))
    M = int(rng.integers(1, 40))
    return random_hypergraph(rng, N, M, max_size=5)


def test_matches_naive_and_invariants():
    rng = np.random.default_rng(0)
    for _ in range(200):
        H = _random_instance(rng)
        seeds = rng.random(H.N) < rng.uniform(0, 0.3)
        res = run_cascade(H, seeds)
        node, edge = naive_cascade(H.members, H.m, H.N, np.flatnonzero(seeds))
        assert np.array_equal(res.final.node_active, node)
        assert np.array_equal(res.final.edge_active, edge)
        # termination bound and quiescence
        assert res.final.steps <= H.N + H.M
        counts = res.final.active_members(H)
        assert not np.any(~res.final.edge_active & (counts >= H.m))
        # trace alternation and partition
        seen_nodes, seen_edges = set(), set()
        for t, ids in res.final.trace:
            target = seen_edges if t % 2 else seen_nodes
            assert not target & set(ids)
            target.update(ids)
        assert seen_nodes == set(np.flatnonzero(res.final.node_active))
        assert seen_edges == set(np.flatnonzero(res.final.edge_active))
        assert res.Q >= seeds.mean() - 1e-12


def test_monotone_in_seeds():
    rng = np.random.default_rng(1)
    for _ in range(200):
        H = _random_instance(rng)
        A = rng.random(H.N) < 0.15
        B = A | (rng.random(H.N) < 0.15)
        fa = run_cascade(H, A, record_trace=False).final.node_active
        fb = run_cascade(H, B, record_trace=False).final.node_active
        assert np.all(fa <= fb)


def test_async_order_same_final_state():
    rng = np.random.default_rng(2)
    for _ in range(50):
        H = _random_instance(rng)
        seeds = np.flatnonzero(rng.random(H.N) < 0.2)
        res = run_cascade(H, seed_vector(H, seeds))
        node, edge = async_cascade(H.members, H.m, H.N, seeds, rng)
        assert np.array_equal(res.final.node_active, node)
        assert np.array_equal(res.final.edge_active, edge)


def test_incremental_equals_union():
    rng = np.random.default_rng(3)
    for _ in range(50):
        H = _random_instance(rng)
        order = rng.permutation(H.N)[: max(1, H.N // 4)].tolist()
        tracker = ActivationTracker(H)
        for s in order:
            tracker.activate([s])
        ref = run_cascade(H, seed_vector(H, order)).final
        st_ = tracker.state()
        assert np.array_equal(st_.node_active, ref.node_active)
        assert np.array_equal(st_.edge_active, ref.edge_active)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deterministic_trace(seed):
    rng = np.random.default_rng(seed)
    H = _random_instance(rng)
    seeds = rng.random(H.N) < 0.2
    assert run_cascade(H, seeds).final.trace == run_cascade(H, seeds).final.trace
