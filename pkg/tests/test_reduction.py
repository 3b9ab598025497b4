import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arboreal.correlation import nc_pair
from arboreal.forest import EventSpec, enumerate_forests, mu
from arboreal.graph import (
    Multigraph,
    bowtie,
    bridges,
    complete,
    cycle,
    is_acyclic,
    is_isomorphic,
    ladder,
    path,
)
from arboreal.reduction import (
    MOVES,
    apply_move,
    beta_series,
    delete_pivotal,
    image_is_forest,
    merge_parallel,
    nc_via_reduction,
    nc_via_reduction_all,
    pushforward_check,
    reduce_pipeline,
    series_constant,
    suppress_degree_two,
)

from conftest import multigraphs


def test_delete_pivotal_examples():
    h, cut, _ = delete_pivotal(path(5))
    assert h.m == 0 and len(cut) == 4
    joined = Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    h, cut, _ = delete_pivotal(joined)
    assert cut == {6} and h.m == 6 and not bridges(h)
    h, cut, _ = delete_pivotal(cycle(5))
    assert not cut and h.m == 5


def test_suppress_c4_stops_at_double_edge():
    h, fmap, _ = suppress_degree_two(cycle(4))
    assert h.n == 2 and h.m == 2 and not h.loops()
    # lowest id first: vertex 0 then vertex 1
    assert sorted(fmap.preimage(h.edges[-1].id)) == [0, 1, 3]


def test_suppress_k4_unchanged():
    h, fmap, st_ = suppress_degree_two(complete(4))
    assert h == complete(4) and not st_.steps


def test_beta_series_examples():
    assert beta_series([1, 1]) == Fraction(1, 3)
    assert beta_series([Fraction(2, 7)]) == Fraction(2, 7)
    assert beta_series([Fraction(1, 2), Fraction(1, 3)]) == Fraction(1, 11)


@given(st.lists(st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9), min_size=1, max_size=5))
def test_beta_series_associative(bs):
    whole = beta_series(bs)
    if len(bs) > 1:
        assert beta_series([beta_series(bs[:2])] + bs[2:]) == whole
    assert 1 + 1 / whole == eval_product([1 + 1 / x for x in bs])
    assert whole > 0


def eval_product(xs):
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


def test_merge_parallel_examples():
    g = Multigraph.from_edges(2, [(0, 1, 1), (0, 1, 2)])
    h, gmap, _ = merge_parallel(g)
    assert h.m == 1 and h.edges[0].weight == 3 and gmap(0) == gmap(1)
    h, gmap, _ = merge_parallel(complete(4))
    assert h == complete(4) and all(gmap(e) == e for e in range(6))
    c4, _, _ = suppress_degree_two(cycle(4))
    h, _, _ = merge_parallel(c4)
    assert h.m == 1 and h.edges[0].weight == Fraction(1, 7) + 1


def test_merge_drops_loops():
    g = Multigraph.from_edges(2, [(0, 1), (1, 1)])
    h, gmap, _ = merge_parallel(g)
    assert h.m == 1 and gmap(1) is None


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_ladder_reduces_to_smaller_ladder(d):
    comps, trace = reduce_pipeline(ladder(d))
    assert len(comps) == 1
    assert is_isomorphic(comps[0], ladder(d - 2))


def test_pipeline_tree_and_bowtie():
    comps, _ = reduce_pipeline(path(4))
    assert [c.n for c in comps] == [1, 1, 1, 1] and all(c.m == 0 for c in comps)
    # no bridges and the cut vertex has degree 4: a single pass keeps one component
    comps, trace = reduce_pipeline(bowtie())
    assert len(comps) == 1 and (comps[0].n, comps[0].m) == (3, 2)
    assert comps[0].is_connected()
    # the merged triangles become bridges, so a fixpoint run does split it
    comps, _ = reduce_pipeline(bowtie(), fixpoint=True)
    assert len(comps) == 3


def test_c4_pushforward_constant():
    comps, trace = reduce_pipeline(cycle(4))
    (e,) = trace.result.edges
    assert e.weight == Fraction(8, 7) and trace.constant_C == 7
    assert trace.constant_C * (1 + e.weight) == 15 == mu(cycle(4))
    assert pushforward_check(cycle(4), EventSpec(), "pipeline") == (15, 15)


def test_identity_reduction():
    lhs, rhs = pushforward_check(complete(4), EventSpec({0}, {5}), "pipeline")
    assert lhs == rhs
    _, trace = reduce_pipeline(complete(4))
    assert trace.constant == 1


def test_ladder3_random_weights():
    rng = random.Random(11)
    g = ladder(3).with_weights({e: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for e in range(7)})
    h, trace = reduce_pipeline(g)
    for e in trace.result.edge_ids:
        for ev in (EventSpec(), EventSpec({e}), EventSpec((), {e})):
            lhs, rhs = pushforward_check(g, ev, "pipeline")
            assert lhs == rhs


@st.composite
def reduced_event(draw, move):
    g = draw(multigraphs(max_n=6, max_m=10, loops=True))
    h, _ = apply_move(g, move)
    req, forb = set(), set()
    for e in h.edge_ids:
        c = draw(st.integers(0, 2))
        if c == 0:
            req.add(e)
        elif c == 1:
            forb.add(e)
    return g, EventSpec(req, forb)


@pytest.mark.parametrize("move", MOVES)
@given(data=st.data())
def test_pushforward_property(move, data):
    g, ev = data.draw(reduced_event(move))
    lhs, rhs = pushforward_check(g, ev, move)
    assert lhs == rhs


@given(multigraphs(max_n=6, max_m=10, loops=True))
def test_image_of_forest_is_forest(g):
    _, trace = reduce_pipeline(g)
    assert image_is_forest(g, trace)


@given(multigraphs(max_n=6, max_m=10, loops=True))
def test_fixpoint_mode_pushforward(g):
    comps, trace = reduce_pipeline(g, fixpoint=True)
    w = g.weights()
    lhs = Fraction(0)
    for F in enumerate_forests(g):
        t = Fraction(1)
        for e in F:
            t *= w[e]
        lhs += t
    assert lhs == trace.constant * mu(trace.result)


@given(multigraphs(max_n=6, max_m=9))
def test_component_factorization(g):
    comps, trace = reduce_pipeline(g)
    prod = Fraction(1)
    for c in comps:
        prod *= mu(c)
    assert mu(trace.result) == prod


def test_series_constant_matches_step_product():
    bs = [Fraction(1, 2), Fraction(3), Fraction(2, 5)]
    # suppressing one vertex at a time multiplies in 1 + a + b per step
    first = 1 + bs[0] + bs[1]
    second = 1 + beta_series(bs[:2]) + bs[2]
    assert series_constant(bs) == first * second


def test_nc_via_reduction_examples():
    g = Multigraph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert nc_via_reduction(g, 3, 0).reason == "pivotal"
    assert nc_via_reduction(cycle(4), 0, 1).reason == "same_reduced_edge"
    v = nc_via_reduction(complete(4), 0, 5)
    assert v.reason == "deferred" and v.sign_agrees
    assert nc_via_reduction(bowtie(), 0, 3).reason == "deferred"
    two = Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    assert nc_via_reduction(two, 0, 3).reason == "different_components"


@given(multigraphs(max_n=5, max_m=8), st.data())
def test_deferred_sign_agrees(g, data):
    if g.m < 2:
        return
    e1, e2 = data.draw(st.lists(st.sampled_from(list(g.edge_ids)), min_size=2, max_size=2, unique=True))
    v = nc_via_reduction(g, e1, e2)
    if v.reason == "deferred":
        assert v.sign_agrees
    else:
        assert nc_pair(g, e1, e2).margin >= 0


@given(multigraphs(max_n=5, max_m=7))
def test_batched_matches_pairwise(g):
    for ps in nc_via_reduction_all(g):
        v = nc_via_reduction(g, *ps.pair)
        assert ps.reason == v.reason
        if v.reason == "deferred":
            assert ps.sign_agrees == v.sign_agrees
            assert (ps.reduced >= 0) == (v.reduced.margin >= 0)


def test_explain_log():
    _, trace = reduce_pipeline(ladder(4))
    lines = trace.lines()
    assert lines[0].startswith("input") and lines[-1] == "result vertices=4 edges=4"
    assert sum(l.startswith("suppress_vertex") for l in lines) == 4
    assert sum(l.startswith("merge_parallel") for l in lines) == 2
