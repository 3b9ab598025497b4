import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arboreal.electrical import (
    contracted_resistance,
    effective_resistance,
    energy,
    kirchhoff_residuals,
    rayleigh_check,
    shared_cycle_current,
    tree_count,
    unit_current_flow,
    ust_edge_probability,
)
from arboreal.errors import DisconnectedError, InvalidOperationError
from arboreal.forest import forest_polynomial
from arboreal.graph import Multigraph, bowtie, complete, cycle, path

from conftest import multigraphs


def ids(g):
    return {(e.u, e.v): e.id for e in g.edges}


def test_k4_tree_counts():
    g = complete(4)
    i = ids(g)
    assert tree_count(g) == 16
    assert tree_count(g, require=[i[0, 1]]) == 8
    assert tree_count(g, require=[i[0, 1], i[2, 3]]) == 4


def test_tree_count_events():
    g = complete(4)
    with pytest.raises(InvalidOperationError):
        tree_count(g, require=[0, 1, 3])  # triangle 01, 02, 12
    with pytest.raises(InvalidOperationError):
        tree_count(g, require=[0], forbid=[0])
    assert tree_count(path(3), forbid=[0]) == 0


def test_weighted_tree_count():
    g = Multigraph.from_edges(3, [(0, 1, 2), (1, 2, 3), (0, 2, 5)])
    assert tree_count(g) == 2 * 3 + 3 * 5 + 2 * 5


def test_resistance_examples():
    assert effective_resistance(path(2), 0, 1) == 1
    assert effective_resistance(complete(4), 0, 1) == Fraction(1, 2)
    assert effective_resistance(path(3), 0, 2) == 2


def test_k4_flow_values():
    g = complete(4)
    i = ids(g)
    flow = unit_current_flow(g, 0, 1)
    assert flow.current[i[0, 1]] == Fraction(1, 2)
    for w in (2, 3):
        assert flow.along(i[0, w], 0) == Fraction(1, 4)
        assert flow.along(i[1, w], w) == Fraction(1, 4)
    assert flow.current[i[2, 3]] == 0


def test_path_flow():
    flow = unit_current_flow(path(3), 0, 2)
    assert flow.current == {0: 1, 1: 1}


def test_c4_flow():
    flow = unit_current_flow(cycle(4), 0, 1)
    assert flow.current[0] == Fraction(3, 4)
    assert flow.flow(0, 3) == Fraction(1, 4)
    assert flow.flow(3, 0) == -Fraction(1, 4)


def test_disconnected_terminals():
    g = Multigraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedError):
        effective_resistance(g, 0, 3)


def test_rayleigh_examples():
    g = cycle(4)
    rep = rayleigh_check(g, 0, 1, 2, [1, 2, 10])
    assert rep.strictly_decreasing and rep.consistent
    pend = Multigraph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    rep = rayleigh_check(pend, 0, 1, 3, [1, 2, 10])
    assert rep.constant and rep.current == 0 and rep.consistent
    rep = rayleigh_check(g, 0, 1, 0, [1, 2, 10])
    assert rep.strictly_decreasing
    with pytest.raises(ValueError):
        rayleigh_check(g, 0, 1, 0, [2, 1])


def test_shared_cycle_examples():
    g = complete(4)
    has, cur = shared_cycle_current(g, 0, 1)
    assert has and cur != 0
    has, cur = shared_cycle_current(bowtie(), 1, 3)
    assert not has and cur == 0
    has, cur = shared_cycle_current(cycle(3), 0, 1)
    assert has and abs(cur) == Fraction(1, 3)
    with pytest.raises(InvalidOperationError):
        shared_cycle_current(bowtie(), 0, 4)


@given(multigraphs(max_n=6, max_m=10, connected=True))
def test_tree_count_is_top_forest_coefficient(g):
    u = g.with_weights(1)
    assert tree_count(u) == forest_polynomial(u).coeff(g.n - 1)


@given(multigraphs(max_n=6, max_m=10, connected=True), st.data())
def test_flow_laws_and_ust_identity(g, data):
    e = data.draw(st.sampled_from(list(g.edges)))
    if e.is_loop:
        return
    flow = unit_current_flow(g, e.u, e.v)
    assert all(v == 0 for v in kirchhoff_residuals(flow, g).values())
    assert energy(flow, g) == flow.resistance
    assert ust_edge_probability(g, e.id) == e.weight * flow.resistance


@given(multigraphs(max_n=6, max_m=10, connected=True), st.data())
def test_contraction_lowers_resistance(g, data):
    u, v = data.draw(st.lists(st.sampled_from(list(g.vertices)), min_size=2, max_size=2, unique=True))
    base = unit_current_flow(g, u, v)
    for e in g.edges:
        if e.is_loop:
            continue
        r = contracted_resistance(g, u, v, e.id)
        assert r <= base.resistance
        if base.current[e.id] != 0:
            assert r < base.resistance


@given(multigraphs(max_n=6, max_m=10, connected=True))
def test_ust_negative_correlation(g):
    t = tree_count(g)
    for a in g.edges:
        for b in g.edges:
            if a.id < b.id and not a.is_loop and not b.is_loop:
                parallel = {a.u, a.v} == {b.u, b.v}
                both = 0 if parallel else tree_count(g, require=[a.id, b.id])
                assert tree_count(g, require=[a.id]) * tree_count(g, require=[b.id]) >= both * t


@given(multigraphs(max_n=6, max_m=10, connected=True), st.data())
def test_shared_cycle_implies_current(g, data):
    pairs = [
        (a.id, b.id)
        for a in g.edges
        for b in g.edges
        if a.id != b.id and not a.is_loop and not b.is_loop and {a.u, a.v} & {b.u, b.v}
    ]
    if not pairs:
        return
    e1, e2 = data.draw(st.sampled_from(pairs))
    has, cur = shared_cycle_current(g, e1, e2)
    if has:
        assert cur != 0
    else:
        assert cur == 0
