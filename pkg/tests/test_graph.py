from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arboreal.errors import GraphFormatError, InvalidOperationError, SizeLimitError
from arboreal.graph import (
    EdgeMap,
    Multigraph,
    UnionFind,
    bowtie,
    bridges,
    canonical_code,
    complete,
    components,
    connected_graphs,
    contract,
    cycle,
    enumerate_small_graphs,
    generate,
    is_isomorphic,
    ladder,
    parse_generator,
    path,
    read_graph,
    write_graph,
)

from conftest import multigraphs


def two_triangles_joined():
    return Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def test_bridges_of_path():
    assert bridges(path(3)) == {0, 1}


def test_cycle_has_no_bridges():
    assert bridges(cycle(4)) == set()


def test_joining_edge_is_the_only_bridge():
    assert bridges(two_triangles_joined()) == {6}


def test_parallel_partner_and_loop_not_pivotal():
    g = Multigraph.from_edges(3, [(0, 1), (0, 1), (1, 2), (2, 2)])
    assert bridges(g) == {2}


def test_contract_triangle_gives_double_edge():
    h, emap = contract(cycle(3), 0, drop_loops=False)
    assert h.n == 2 and h.m == 2 and not h.loops()
    assert emap.dropped == {0}


def test_contract_k4_keeps_parallels():
    h, _ = contract(complete(4), 0, drop_loops=False)
    assert h.n == 3 and h.m == 5
    assert sorted(h.degree(x) for x in h.vertices) == [3, 3, 4]


def test_contract_triangle_drop_loops():
    g = Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2), (0, 1)])
    h, emap = contract(g, 0, drop_loops=True)
    assert h.m == 2 and not h.loops()
    assert emap.dropped == {0, 3}


def test_contract_loop_rejected():
    g = Multigraph.from_edges(2, [(0, 1), (1, 1)])
    with pytest.raises(InvalidOperationError):
        contract(g, 1)


def test_components_examples():
    two = Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert [len(c) for c in components(two)] == [3, 3]
    assert len(components(complete(5))) == 1
    assert len(components(Multigraph.from_edges(4, []))) == 4


@pytest.mark.parametrize(
    "spec,n,m",
    [("complete:4", 4, 6), ("ladder:3", 6, 7), ("bowtie", 5, 6), ("complete_bipartite:2,3", 5, 6),
     ("path:5", 5, 4), ("cycle:6", 6, 6)],
)
def test_generators(spec, n, m):
    g = parse_generator(spec)
    assert (g.n, g.m) == (n, m)


def test_ladder_edge_count():
    for d in range(1, 7):
        g = ladder(d)
        assert (g.n, g.m) == (2 * d, 3 * d - 2)


def test_generate_rejects_bad_sizes():
    with pytest.raises(ValueError):
        generate("complete", 0)
    with pytest.raises(ValueError):
        generate("petersen", 3)


def test_generate_weight():
    g = complete(3, weight="2/3")
    assert g.is_uniform() and g.weight(0) == Fraction(2, 3)


@pytest.mark.parametrize("n_max,count", [(2, 1), (3, 2), (4, 6)])
def test_small_graph_counts_per_n(n_max, count):
    assert len(list(enumerate_small_graphs(n_max, n_min=n_max))) == count


def test_small_graph_counts_cumulative():
    assert len(list(enumerate_small_graphs(3))) == 3
    assert [len(list(connected_graphs(n))) for n in range(2, 7)] == [1, 2, 6, 21, 112]


def test_nondedup_count_matches_subset_filter():
    for n in (3, 4):
        pairs = list(combinations(range(n), 2))
        expect = 0
        for mask in range(1 << len(pairs)):
            uf = UnionFind(range(n))
            for i, (a, b) in enumerate(pairs):
                if mask >> i & 1:
                    uf.union(a, b)
            expect += len({uf.find(x) for x in range(n)}) == 1
        assert len(list(connected_graphs(n, dedup=False))) == expect


def test_dedup_matches_brute_force_isomorphism():
    reps = list(connected_graphs(5, dedup=False))
    classes = []
    for g in reps:
        if not any(is_isomorphic(g, h) for h in classes):
            classes.append(g)
    assert len(classes) == 21


def test_enumeration_limit():
    with pytest.raises(SizeLimitError):
        list(enumerate_small_graphs(9))


@given(multigraphs(max_n=6, max_m=9, loops=True), st.randoms(use_true_random=False))
def test_canonical_code_is_relabel_invariant(g, rng):
    perm = list(g.vertices)
    rng.shuffle(perm)
    mapping = dict(zip(g.vertices, perm))
    h = Multigraph.from_edges(g.n, [(mapping[e.u], mapping[e.v]) for e in g.edges])
    assert canonical_code(g) == canonical_code(h)


@given(multigraphs(max_n=6, max_m=9, loops=True))
def test_bridges_match_component_oracle(g):
    base = len(components(g))
    oracle = {e.id for e in g.edges if len(components(g.delete_edges([e.id]))) > base}
    assert bridges(g) == oracle


@given(multigraphs(max_n=6, max_m=9, loops=True), st.data())
def test_contract_counts(g, data):
    candidates = [e.id for e in g.edges if not e.is_loop]
    if not candidates:
        return
    eid = data.draw(st.sampled_from(candidates))
    e = g.edge(eid)
    h, emap = contract(g, eid, drop_loops=True)
    new_loops = sum(
        1 for f in g.edges if f.id != eid and {f.u, f.v} <= {e.u, e.v}
    )
    assert h.n == g.n - 1
    assert h.m == g.m - 1 - new_loops
    assert len(emap.dropped) == 1 + new_loops


def test_edgemap_composition():
    f = EdgeMap({0: 5, 1: 5, 2: 6}, frozenset({3}))
    g = EdgeMap({5: 9, 6: 9}, frozenset())
    h = f.then(g)
    assert h(0) == h(2) == 9 and h(3) is None
    assert f.preimage(5) == [0, 1]


def test_union_find():
    uf = UnionFind(range(4))
    assert uf.union(0, 1) and uf.union(2, 3)
    assert not uf.union(1, 0)
    assert uf.find(0) == uf.find(uf.find(0))


def test_roundtrip_text_format():
    g = read_graph("# bowtie-ish\nvertices 3\n0 1 1/2 a\n1 2 3\n0 2 2/3\n")
    assert g.n == 3 and g.edge(0).label == "a" and g.weight(1) == 3
    assert read_graph(write_graph(g)).edges == g.edges


@pytest.mark.parametrize(
    "text,line",
    [("vertices 2\n0 1 1/0\n", 2), ("vertices 2\n0 5 1\n", 2), ("edges 3\n", 1),
     ("vertices 2\n\n# c\n0 1 -1\n", 4), ("vertices 2\n0 1\n", 2)],
)
def test_format_errors_carry_line(text, line):
    with pytest.raises(GraphFormatError) as exc:
        read_graph(text)
    assert exc.value.line == line


def test_bowtie_shape():
    g = bowtie()
    assert g.degree(2) == 4 and not bridges(g)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        Multigraph.from_edges(2, [(0, 1, 0)])
