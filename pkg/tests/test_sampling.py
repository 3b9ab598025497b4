from fractions import Fraction
from itertools import combinations
from math import sqrt

import pytest
from scipy.stats import chisquare

from arboreal.errors import DisconnectedError, TooDenseError
from arboreal.forest import EventSpec, prob
from arboreal.graph import Multigraph, complete, cycle, is_acyclic, path
from arboreal.correlation import nc_pair
from arboreal.sampling import arboreal_rejection, mc_nc_probe, ust_counts, wilson_ust


def within(est, exact, n, k=3.0):
    p = float(exact)
    return abs(est - p) <= k * sqrt(p * (1 - p) / n) + 1e-12


def test_wilson_single_edge():
    g = Multigraph.from_edges(2, [(0, 1)])
    assert all(wilson_ust(g, seed=s) == {0} for s in range(5))


def test_wilson_returns_spanning_trees():
    g = complete(5)
    for s in range(20):
        t = wilson_ust(g, seed=s)
        assert len(t) == 4 and is_acyclic(g, t)


def test_wilson_k4_uniform():
    counts = ust_counts(complete(4), 4000, seed=5)
    assert len(counts) == 16
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_wilson_k5_edge_marginal():
    n = 5000
    counts = ust_counts(complete(5), n, seed=2)
    hits = sum(c for t, c in counts.items() if 0 in t)
    assert within(hits / n, Fraction(2, 5), n)


def test_wilson_weighted():
    g = Multigraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
    n = 6000
    counts = ust_counts(g, n, seed=9)
    # tree weights 2, 3, 6 for the trees missing edges 2, 1, 0
    total = 11
    for missing, w in ((2, 2), (1, 3), (0, 6)):
        tree = frozenset({0, 1, 2} - {missing})
        assert within(counts[tree] / n, Fraction(w, total), n)


def test_wilson_disconnected():
    with pytest.raises(DisconnectedError):
        wilson_ust(Multigraph.from_edges(4, [(0, 1), (2, 3)]), seed=0)


def test_rejection_triangle():
    n = 20000
    rep = arboreal_rejection(cycle(3), 1, 4, n)
    assert within(rep.frequency(0), Fraction(3, 7), n)


def test_rejection_tree_always_accepts():
    assert arboreal_rejection(path(5), 1, 0, 500).acceptance_rate == 1


def test_rejection_c4_acceptance():
    rep = arboreal_rejection(cycle(4), 1, 3, 20000)
    assert abs(rep.acceptance_rate - 15 / 16) < 4 * sqrt(15 / 16 / 16 / rep.trials)


@pytest.mark.parametrize("g", [cycle(3), cycle(4), complete(4)], ids=["C3", "C4", "K4"])
@pytest.mark.parametrize("beta", [Fraction(1, 2), 1, 2])
def test_rejection_marginals(g, beta):
    n = 6000
    rep = arboreal_rejection(g, beta, 17, n)
    exact_g = g.with_weights(beta)
    for e in g.edge_ids:
        assert within(rep.frequency(e), prob(exact_g, EventSpec({e})), n)


def test_too_dense():
    with pytest.raises(TooDenseError):
        arboreal_rejection(complete(8), 50, 0, 10, window=2000)


def test_determinism_and_merge():
    a = arboreal_rejection(cycle(4), 1, 42, 300)
    b = arboreal_rejection(cycle(4), 1, 42, 300)
    assert a == b
    m = a.merge(b)
    assert m.n_samples == 600 and m.edge_counts[0] == 2 * a.edge_counts[0]


def test_probe_triangle():
    est = mc_nc_probe(cycle(3), 1, 0, 1, 0, 30000)
    assert abs(est.margin - 2 / 49) <= 3 * est.stderr


def test_probe_stderr_calibrated():
    zs = []
    for seed in range(100, 140):
        est = mc_nc_probe(cycle(3), 1, 0, 1, seed, 2000)
        zs.append((est.margin - 2 / 49) / est.stderr)
    spread = sqrt(sum(z * z for z in zs) / len(zs))
    assert 0.7 < spread < 1.3


def test_probe_path():
    est = mc_nc_probe(path(4), 1, 0, 2, 8, 20000)
    assert abs(est.margin) <= 3 * est.stderr


def test_probe_k5_sign():
    g = complete(5)
    exact = nc_pair(g, 0, 9).margin
    est = mc_nc_probe(g, 1, 0, 9, 1, 20000)
    assert exact > 0
    assert est.margin > -3 * est.stderr
