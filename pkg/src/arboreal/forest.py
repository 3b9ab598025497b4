"""Arboreal gas weights and probabilities.

For disjoint edge sets ``require`` (S1) and ``forbid`` (S2),

    mu[S1 ~S2] = sum over forests F with S1 <= F, F & S2 = {} of prod_{e in F - S1} beta_e

so ``mu[(), ()]`` is the partition function Z.  Values are exact Fractions
with per-edge weights, or a :class:`BetaPolynomial` in symbolic mode where
every edge carries the same formal beta.

Two independent routes are provided: :func:`enumerate_mu` sums over forests
directly, :func:`mu` runs weighted deletion-contraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from .errors import ConditioningError, ModeError, SizeLimitError
from .exact import BetaPolynomial, as_fraction
from .graph import Multigraph, UnionFind, contract_set, is_acyclic

MAX_ENUM_EDGES = 22
DEFAULT_CACHE_SIZE = 200_000


@dataclass(frozen=True)
class EventSpec:
    """Forests containing every edge of ``require`` and none of ``forbid``."""

    require: frozenset = frozenset()
    forbid: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "require", frozenset(self.require))
        object.__setattr__(self, "forbid", frozenset(self.forbid))
        if self.require & self.forbid:
            raise ValueError(f"required and forbidden edges overlap: {sorted(self.require & self.forbid)}")

    def check(self, g: Multigraph) -> None:
        unknown = (self.require | self.forbid) - set(g.edge_ids)
        if unknown:
            raise KeyError(f"event mentions unknown edges {sorted(unknown)}")

    def matches(self, forest: frozenset) -> bool:
        return self.require <= forest and not (self.forbid & forest)


def _check_mode(g: Multigraph, symbolic: bool) -> None:
    if symbolic and not g.is_uniform():
        raise ModeError("symbolic mode needs uniform edge weights; use rational mode")


def _zero(symbolic: bool):
    return BetaPolynomial() if symbolic else Fraction(0)


def enumerate_forests(g: Multigraph) -> Iterator[frozenset]:
    """Every forest (as a set of edge ids) of ``g``; loops never appear."""
    edges = [e for e in g.edges if not e.is_loop]

    def rec(i: int, uf: UnionFind, chosen: list):
        if i == len(edges):
            yield frozenset(chosen)
            return
        e = edges[i]
        yield from rec(i + 1, uf, chosen)
        if uf.find(e.u) != uf.find(e.v):
            uf2 = uf.copy()
            uf2.union(e.u, e.v)
            chosen.append(e.id)
            yield from rec(i + 1, uf2, chosen)
            chosen.pop()

    yield from rec(0, UnionFind(g.vertices), [])


def enumerate_mu(g: Multigraph, ev: EventSpec = EventSpec(), symbolic: bool = False):
    """Reference value of mu by summing over all forests (|E| <= 22)."""
    if g.m > MAX_ENUM_EDGES:
        raise SizeLimitError(f"enumeration limited to {MAX_ENUM_EDGES} edges, graph has {g.m}")
    ev.check(g)
    _check_mode(g, symbolic)
    if not is_acyclic(g, ev.require):
        return _zero(symbolic)
    if symbolic:
        counts: dict[int, int] = {}
        for F in enumerate_forests(g):
            if ev.matches(F):
                k = len(F) - len(ev.require)
                counts[k] = counts.get(k, 0) + 1
        top = max(counts, default=-1)
        return BetaPolynomial(counts.get(k, 0) for k in range(top + 1))
    w = g.weights()
    total = Fraction(0)
    for F in enumerate_forests(g):
        if ev.matches(F):
            term = Fraction(1)
            for eid in F - ev.require:
                term *= w[eid]
            total += term
    return total


class _DeletionContraction:
    """Forest partition function of a weighted multigraph, memoized per instance."""

    def __init__(self, one, cache_size: int):
        self.one = one
        self.cache: dict = {}
        self.cache_size = cache_size

    @staticmethod
    def _normalize(edges):
        merged: dict = {}
        for a, b, w in edges:
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            merged[key] = merged[key] + w if key in merged else w
        used = sorted({x for k in merged for x in k})
        pos = {x: i for i, x in enumerate(used)}
        return tuple(sorted(((pos[a], pos[b]), w) for (a, b), w in merged.items()))

    def __call__(self, edges) -> object:
        return self._z(self._normalize(edges))

    def _z(self, key):
        if not key:
            return self.one
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        value = self._compute(key)
        if len(self.cache) < self.cache_size:
            self.cache[key] = value
        return value

    def _compute(self, key):
        adj: dict = {}
        for (a, b), _ in key:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        # connected components
        comp = {}
        for s in adj:
            if s in comp:
                continue
            comp[s] = s
            stack = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp[y] = s
                        stack.append(y)
        if len(set(comp.values())) > 1:
            groups: dict = {}
            for (a, b), w in key:
                groups.setdefault(comp[a], []).append((a, b, w))
            result = self.one
            for part in groups.values():
                result = result * self(part)
            return result
        cut = _simple_bridges(adj)
        if cut:
            result = self.one
            rest = []
            for (a, b), w in key:
                if (a, b) in cut:
                    result = result * (w + 1)
                else:
                    rest.append((a, b, w))
            return result * self(rest)
        (a, b), w = max(key, key=lambda item: len(adj[item[0][0]]) + len(adj[item[0][1]]))
        deleted = [(x, y, v) for (x, y), v in key if (x, y) != (a, b)]
        contracted = [(a if x == b else x, a if y == b else y, v) for x, y, v in deleted]
        return self(deleted) + w * self(contracted)


def _simple_bridges(adj: dict) -> set:
    """Bridges of a simple graph given as ``vertex -> neighbours``; pairs (a, b), a < b."""
    disc: dict = {}
    low: dict = {}
    out = set()
    timer = 0
    for root in adj:
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            x, parent, it = stack[-1]
            for y in it:
                if y == parent:
                    continue
                if y in disc:
                    low[x] = min(low[x], disc[y])
                else:
                    disc[y] = low[y] = timer
                    timer += 1
                    stack.append((y, x, iter(adj[y])))
                    break
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[x])
                    if low[x] > disc[p]:
                        out.add((p, x) if p < x else (x, p))
    return out


def mu(
    g: Multigraph,
    ev: EventSpec = EventSpec(),
    symbolic: bool = False,
    cache_size: int = DEFAULT_CACHE_SIZE,
):
    """mu[S1 ~S2] by deletion-contraction.

    Required edges are contracted and forbidden ones deleted first, then the
    forest partition function of the residual multigraph is computed with
    parallel classes merged (weights add), bridges factored out as
    ``(1 + beta)`` and components multiplied.
    """
    ev.check(g)
    _check_mode(g, symbolic)
    if not is_acyclic(g, ev.require):
        return _zero(symbolic)
    h = contract_set(g, ev.require, drop_loops=True)
    h = h.delete_edges(e for e in ev.forbid if e in h)
    if symbolic:
        beta = BetaPolynomial.beta()
        edges = [(e.u, e.v, beta) for e in h.edges]
        engine = _DeletionContraction(BetaPolynomial.constant(1), cache_size)
    else:
        edges = [(e.u, e.v, e.weight) for e in h.edges]
        engine = _DeletionContraction(Fraction(1), cache_size)
    return engine(edges)


def partition_function(g: Multigraph, symbolic: bool = False):
    return mu(g, EventSpec(), symbolic)


def forest_polynomial(g: Multigraph) -> BetaPolynomial:
    """Z as a polynomial in a uniform beta; the coefficient of beta**k counts k-edge forests."""
    return mu(g.with_weights(1), EventSpec(), symbolic=True)


def _req_weight(g: Multigraph, eids: Iterable[int]) -> Fraction:
    out = Fraction(1)
    for e in eids:
        out *= g.weight(e)
    return out


def prob(g: Multigraph, ev: EventSpec = EventSpec()) -> Fraction:
    """P[S1 in F, S2 disjoint from F] under the per-edge weights of ``g``."""
    return mu(g, ev) * _req_weight(g, ev.require) / mu(g)


def conditional_prob(g: Multigraph, ev: EventSpec, given: Iterable[int]) -> Fraction:
    given = frozenset(given)
    if not is_acyclic(g, given):
        raise ConditioningError(f"conditioning set {sorted(given)} contains a cycle")
    if ev.forbid & given:
        return Fraction(0)
    joint = EventSpec(ev.require | given, ev.forbid)
    return prob(g, joint) / prob(g, EventSpec(given))


def percolation_check(g: Multigraph, beta, ev: EventSpec = EventSpec()) -> tuple[Fraction, Fraction]:
    """(Bernoulli(p) conditioned on acyclicity, arboreal gas) probabilities of ``ev``.

    ``p = beta / (1 + beta)``; the left side scans all 2^|E| configurations.
    """
    if g.m > MAX_ENUM_EDGES:
        raise SizeLimitError(f"subset scan limited to {MAX_ENUM_EDGES} edges, graph has {g.m}")
    ev.check(g)
    beta = as_fraction(beta)
    p = beta / (1 + beta)
    q = 1 - p
    edges = list(g.edges)
    m = len(edges)
    pw = [p**k * q ** (m - k) for k in range(m + 1)]
    req = sum(1 << i for i, e in enumerate(edges) if e.id in ev.require)
    forb = sum(1 << i for i, e in enumerate(edges) if e.id in ev.forbid)
    acyclic = Fraction(0)
    hit = Fraction(0)
    for mask in range(1 << m):
        uf = UnionFind(g.vertices)
        ok = True
        for i, e in enumerate(edges):
            if mask >> i & 1 and not uf.union(e.u, e.v):
                ok = False
                break
        if not ok:
            continue
        weight = pw[bin(mask).count("1")]
        acyclic += weight
        if mask & req == req and not mask & forb:
            hit += weight
    return hit / acyclic, prob(g.with_weights(beta), ev)


@dataclass(frozen=True)
class ForestMarginals:
    """Unnormalized forest weights: ``Z``, ``single[e]`` = W[e in F], ``pair[e, f]`` = W[e, f in F]."""

    Z: Fraction
    single: dict
    pair: dict

    def prob(self, *eids: int) -> Fraction:
        if len(eids) == 1:
            return self.single[eids[0]] / self.Z
        a, b = sorted(eids)
        return self.pair[a, b] / self.Z

    def nc_margin(self, e1: int, e2: int) -> Fraction:
        """Z^2 (P[e1] P[e2] - P[e1 e2]); same sign as the mu-form margin."""
        a, b = sorted((e1, e2))
        return self.single[a] * self.single[b] - self.pair[a, b] * self.Z


def forest_marginals(g: Multigraph) -> ForestMarginals:
    """All single and pairwise inclusion weights from one forest enumeration."""
    if g.m > MAX_ENUM_EDGES:
        raise SizeLimitError(f"enumeration limited to {MAX_ENUM_EDGES} edges, graph has {g.m}")
    w = g.weights()
    ids = sorted(e.id for e in g.edges)
    Z = Fraction(0)
    single = {e: Fraction(0) for e in ids}
    pair = {p: Fraction(0) for p in combinations(ids, 2)}
    for F in enumerate_forests(g):
        t = Fraction(1)
        for e in F:
            t *= w[e]
        Z += t
        fs = sorted(F)
        for e in fs:
            single[e] += t
        for p in combinations(fs, 2):
            pair[p] += t
    return ForestMarginals(Z, single, pair)
