"""Reduction calculus: bridge deletion, series suppression, parallel merging.

Each move comes with an edge map and a forest correspondence under which
forest weights push forward exactly:

* bridge deletion: forests of G are (forest of G - b) x {b in, b out};
  the constant is ``1 + beta_b``.
* series suppression: a chain of edges collapses to one edge, present iff
  every edge of the chain is; ``beta~ = prod beta / (prod(1+beta) - prod beta)``
  and the chain contributes ``prod(1+beta) - prod beta`` to the constant.
* parallel merge: a class collapses to one edge, present iff some member
  is; weights add and the constant is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from fractions import Fraction
from typing import Iterable, Sequence

from .correlation import NCMargin, nc_pair
from .errors import InvalidOperationError, SizeLimitError
from .exact import as_fraction, fmt
from .forest import MAX_ENUM_EDGES, EventSpec, enumerate_forests, forest_marginals, mu
from .graph import EdgeMap, Multigraph, bridges, components, is_acyclic

BRIDGE, SERIES, PARALLEL, PIPELINE = "bridge", "series", "parallel", "pipeline"
MOVES = (BRIDGE, SERIES, PARALLEL, PIPELINE)


def beta_series(betas: Sequence) -> Fraction:
    """Effective weight of edges in series; associative, since 1 + 1/b~ = prod(1 + 1/b)."""
    betas = [as_fraction(b) for b in betas]
    if not betas:
        raise ValueError("beta_series needs at least one weight")
    if any(b <= 0 for b in betas):
        raise ValueError("weights must be positive")
    prod, prod1 = Fraction(1), Fraction(1)
    for b in betas:
        prod *= b
        prod1 *= 1 + b
    return prod / (prod1 - prod)


def series_constant(betas: Sequence) -> Fraction:
    prod, prod1 = Fraction(1), Fraction(1)
    for b in betas:
        prod *= b
        prod1 *= 1 + b
    return prod1 - prod


# -- steps ------------------------------------------------------------------


@dataclass(frozen=True)
class DeleteBridge:
    edge: int
    u: int
    v: int
    beta: Fraction

    def line(self) -> str:
        return f"delete_bridge edge={self.edge} ({self.u},{self.v}) beta={fmt(self.beta)}"


@dataclass(frozen=True)
class SuppressVertex:
    vertex: int
    in_edges: tuple[int, int]
    out_edge: int
    endpoints: tuple[int, int]
    beta_tilde: Fraction

    def line(self) -> str:
        a, b = self.in_edges
        u, v = self.endpoints
        return (f"suppress_vertex vertex={self.vertex} in=({a},{b}) "
                f"out={self.out_edge} ({u},{v}) beta_tilde={fmt(self.beta_tilde)}")


@dataclass(frozen=True)
class MergeParallel:
    edge_class: tuple[int, ...]
    out_edge: int
    beta_sum: Fraction

    def line(self) -> str:
        cls = ",".join(map(str, self.edge_class))
        return f"merge_parallel class=({cls}) out={self.out_edge} beta_sum={fmt(self.beta_sum)}"


@dataclass(frozen=True)
class DropLoop:
    edge: int

    def line(self) -> str:
        return f"drop_loop edge={self.edge}"


# A stage is one move applied to a whole graph: an edge map plus the rule that
# decides whether an image edge is in the image forest ("all" or "any" of its
# preimage).  Composing stages gives the full forest correspondence.


@dataclass(frozen=True)
class Stage:
    kind: str
    emap: EdgeMap
    rule: str
    constant: Fraction
    steps: tuple = ()

    def push(self, forest: frozenset) -> frozenset:
        targets: dict = {}
        for s, t in self.emap.pairs.items():
            targets.setdefault(t, []).append(s)
        if self.rule == "all":
            return frozenset(t for t, src in targets.items() if all(s in forest for s in src))
        return frozenset(t for t, src in targets.items() if any(s in forest for s in src))


def delete_pivotal(g: Multigraph) -> tuple[Multigraph, frozenset, Stage]:
    """Remove every bridge in one pass; no bridges remain afterwards (asserted)."""
    cut = bridges(g)
    h = g.delete_edges(cut)
    leftover = bridges(h)
    assert not leftover, f"bridges remain after deletion: {sorted(leftover)}"
    constant = Fraction(1)
    steps = []
    for eid in sorted(cut):
        e = g.edge(eid)
        constant *= 1 + e.weight
        steps.append(DeleteBridge(eid, e.u, e.v, e.weight))
    emap = EdgeMap({e.id: e.id for e in h.edges}, frozenset(cut))
    return h, frozenset(cut), Stage(BRIDGE, emap, "all", constant, tuple(steps))


def _suppressible(g: Multigraph, x: int):
    inc = g.incident(x)
    if len(inc) != 2 or any(e.is_loop for e in inc):
        return None
    a, b = inc
    if a.other(x) == b.other(x):
        return None  # would create a self-loop
    return a, b


def suppress_degree_two(g: Multigraph) -> tuple[Multigraph, EdgeMap, Stage]:
    """Suppress degree-2 vertices, lowest id first, until none can be suppressed.

    Suppression never creates a self-loop, so a cycle stops at two vertices
    joined by a double edge.  The effective weight of each new edge is
    computed from the input weights of its whole series class.
    """
    orig_w = g.weights()
    cls = {e.id: (e.id,) for e in g.edges}
    steps = []
    h = g
    while True:
        pick = None
        for x in sorted(h.vertices):
            if h.degree(x) == 2:
                pick = _suppressible(h, x)
                if pick:
                    break
        if not pick:
            break
        a, b = pick
        u, v = sorted((a.other(x), b.other(x)))
        members = tuple(sorted(cls.pop(a.id) + cls.pop(b.id)))
        bt = beta_series([orig_w[s] for s in members])
        h = h.delete_edges([a.id, b.id]).delete_vertices([x])
        h, new = h.add_edge(u, v, bt)
        cls[new] = members
        steps.append(SuppressVertex(x, (a.id, b.id), new, (u, v), bt))
    pairs = {s: t for t, members in cls.items() for s in members}
    constant = Fraction(1)
    for members in cls.values():
        constant *= series_constant([orig_w[s] for s in members])
    fmap = EdgeMap(pairs)
    return h, fmap, Stage(SERIES, fmap, "all", constant, tuple(steps))


def merge_parallel(g: Multigraph) -> tuple[Multigraph, EdgeMap, Stage]:
    """One edge per adjacent vertex pair with summed weight; loops are dropped."""
    groups: dict = {}
    loops = []
    for e in g.edges:
        if e.is_loop:
            loops.append(e.id)
            continue
        groups.setdefault((min(e.u, e.v), max(e.u, e.v)), []).append(e)
    pairs = {}
    steps = [DropLoop(x) for x in loops]
    kept = []
    for (u, v), es in groups.items():
        if len(es) == 1:
            kept.append(es[0])
            pairs[es[0].id] = es[0].id
    h = Multigraph(g.vertices, tuple(kept), g.next_id)
    for (u, v), es in groups.items():
        if len(es) > 1:
            total = sum((e.weight for e in es), Fraction(0))
            h, new = h.add_edge(u, v, total)
            for e in es:
                pairs[e.id] = new
            steps.append(MergeParallel(tuple(e.id for e in es), new, total))
    gmap = EdgeMap(pairs, frozenset(loops))
    return h, gmap, Stage(PARALLEL, gmap, "any", Fraction(1), tuple(steps))


# -- pipeline ---------------------------------------------------------------


@dataclass(frozen=True)
class ReductionTrace:
    """Record of a reduction run.

    ``f_map`` composes bridge deletion and suppression, ``g_map`` the
    parallel merge (first round only in fixpoint mode; ``edge_map`` always
    covers every round).  ``constant_C`` is the series-class product and
    ``bridge_factor`` the product of ``1 + beta_b`` over deleted bridges.
    """

    stages: tuple
    f_map: EdgeMap
    g_map: EdgeMap
    edge_map: EdgeMap
    constant_C: Fraction
    bridge_factor: Fraction
    source: Multigraph = field(repr=False)
    result: Multigraph = field(repr=False)

    @property
    def steps(self) -> list:
        return [s for st in self.stages for s in st.steps]

    @property
    def constant(self) -> Fraction:
        return self.constant_C * self.bridge_factor

    def image(self, eid: int) -> int | None:
        return self.edge_map(eid)

    def push(self, forest: frozenset) -> frozenset:
        for st in self.stages:
            forest = st.push(forest)
        return forest

    def lines(self) -> list[str]:
        out = [f"input vertices={self.source.n} edges={self.source.m}"]
        out += [s.line() for s in self.steps]
        out.append(f"constant_C={fmt(self.constant_C)} bridge_factor={fmt(self.bridge_factor)}")
        for e in self.result.edges:
            src = ",".join(map(str, self.edge_map.preimage(e.id)))
            out.append(f"edge {e.id} ({e.u},{e.v}) beta={fmt(e.weight)} from=({src})")
        out.append(f"result vertices={self.result.n} edges={self.result.m}")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _trace(g: Multigraph, h: Multigraph, stages: list, n_first: int) -> ReductionTrace:
    emap = EdgeMap.identity(g.edge_ids)
    for st in stages:
        emap = emap.then(st.emap)
    first = stages[:n_first]
    f_map = EdgeMap.identity(g.edge_ids)
    for st in first[:-1]:
        f_map = f_map.then(st.emap)
    g_map = first[-1].emap
    C = Fraction(1)
    bf = Fraction(1)
    for st in stages:
        if st.kind == BRIDGE:
            bf *= st.constant
        else:
            C *= st.constant
    return ReductionTrace(tuple(stages), f_map, g_map, emap, C, bf, g, h)


def reduce_pipeline(g: Multigraph, fixpoint: bool = False) -> tuple[list[Multigraph], ReductionTrace]:
    """Bridges, then suppression (f), then merging (g), then split into components.

    One pass by default.  With ``fixpoint`` the three moves repeat until the
    graph stops changing.
    """
    stages = []
    h = g
    while True:
        h1, cut, s1 = delete_pivotal(h)
        h2, _, s2 = suppress_degree_two(h1)
        h3, _, s3 = merge_parallel(h2)
        changed = bool(cut or s2.steps or s3.steps)
        if not stages or changed:
            stages += [s1, s2, s3]
        h = h3
        if not fixpoint or not changed:
            break
    trace = _trace(g, h, stages, 3)
    comps = [h.induced(c) for c in components(h)]
    return comps, trace


def apply_move(g: Multigraph, move: str) -> tuple[Multigraph, ReductionTrace]:
    if move == BRIDGE:
        h, _, st = delete_pivotal(g)
    elif move == SERIES:
        h, _, st = suppress_degree_two(g)
    elif move == PARALLEL:
        h, _, st = merge_parallel(g)
    elif move == PIPELINE:
        comps, trace = reduce_pipeline(g)
        return trace.result, trace
    else:
        raise ValueError(f"unknown move {move!r}; choose from {MOVES}")
    return h, _trace(g, h, [st], 1)


def pushforward_check(g: Multigraph, ev: EventSpec, move: str = PIPELINE) -> tuple[Fraction, Fraction]:
    """(W_G(preimage of ev), C * W~(ev)) for the reduced graph of ``move``.

    W are undivided forest weights.  The left side enumerates forests of G and
    pushes each through the recorded correspondence; the right side runs
    deletion-contraction on the reduced graph.
    """
    if g.m > MAX_ENUM_EDGES:
        raise SizeLimitError(f"enumeration limited to {MAX_ENUM_EDGES} edges, graph has {g.m}")
    h, trace = apply_move(g, move)
    ev.check(h)
    w = g.weights()
    lhs = Fraction(0)
    for F in enumerate_forests(g):
        if ev.matches(trace.push(F)):
            t = Fraction(1)
            for e in F:
                t *= w[e]
            lhs += t
    rhs = mu(h, ev)
    for e in ev.require:
        rhs *= h.weight(e)
    return lhs, trace.constant * rhs


# -- NC through the reduction ----------------------------------------------


@dataclass(frozen=True)
class ReductionVerdict:
    verdict: str
    reason: str
    reduced: NCMargin | None = None
    direct: NCMargin | None = None
    images: tuple = ()

    @property
    def sign_agrees(self) -> bool | None:
        if self.reduced is None or self.direct is None:
            return None
        return (self.reduced.margin >= 0) == (self.direct.margin >= 0)


def nc_via_reduction(g: Multigraph, e1: int, e2: int, check_direct: bool = True) -> ReductionVerdict:
    """NC for a pair, settled structurally where possible.

    Reasons ``pivotal``, ``same_reduced_edge`` and ``different_components``
    settle the pair (margin >= 0).  A self-loop is never in a forest, so its
    margin is exactly 0 (reason ``loop``).  Otherwise the margin is computed
    on the reduced component with transformed weights (reason ``deferred``)
    and, with ``check_direct``, also on G itself.
    """
    if e1 == e2:
        raise InvalidOperationError("nc_via_reduction needs two distinct edges")
    if g.edge(e1).is_loop or g.edge(e2).is_loop:
        return ReductionVerdict("holds", "loop")
    cut = bridges(g)
    if e1 in cut or e2 in cut:
        return ReductionVerdict("holds", "pivotal")
    comps, trace = reduce_pipeline(g)
    i1, i2 = trace.image(e1), trace.image(e2)
    if i1 == i2:
        return ReductionVerdict("holds", "same_reduced_edge", images=(i1, i2))
    home = next(c for c in comps if i1 in c)
    if i2 not in home:
        return ReductionVerdict("holds", "different_components", images=(i1, i2))
    red = nc_pair(home, i1, i2)
    direct = nc_pair(g, e1, e2) if check_direct else None
    return ReductionVerdict(red.verdict, "deferred", red, direct, (i1, i2))


@dataclass(frozen=True)
class PairSign:
    """Batched verdict for one pair; margins are Z^2-scaled, so only signs compare."""

    pair: tuple
    reason: str
    reduced: Fraction | None = None
    direct: Fraction | None = None

    @property
    def sign_agrees(self) -> bool | None:
        if self.reduced is None or self.direct is None:
            return None
        return (self.reduced >= 0) == (self.direct >= 0)


def nc_via_reduction_all(g: Multigraph) -> list[PairSign]:
    """nc_via_reduction for every pair, sharing one pipeline run and one
    forest enumeration per graph."""
    comps, trace = reduce_pipeline(g)
    cut = bridges(g)
    direct = forest_marginals(g)
    home_of = {}
    for c in comps:
        fm = forest_marginals(c) if c.m else None
        for e in c.edge_ids:
            home_of[e] = (id(c), fm)
    out = []
    for e1, e2 in combinations(sorted(g.edge_ids), 2):
        if g.edge(e1).is_loop or g.edge(e2).is_loop:
            out.append(PairSign((e1, e2), "loop"))
            continue
        if e1 in cut or e2 in cut:
            out.append(PairSign((e1, e2), "pivotal"))
            continue
        i1, i2 = trace.image(e1), trace.image(e2)
        if i1 == i2:
            out.append(PairSign((e1, e2), "same_reduced_edge"))
            continue
        (c1, fm), (c2, _) = home_of[i1], home_of[i2]
        if c1 != c2:
            out.append(PairSign((e1, e2), "different_components"))
            continue
        out.append(PairSign((e1, e2), "deferred", fm.nc_margin(i1, i2), direct.nc_margin(e1, e2)))
    return out


def image_is_forest(g: Multigraph, trace: ReductionTrace, forests: Iterable[frozenset] | None = None) -> bool:
    """Every forest of g pushes to a forest of the reduced graph."""
    forests = enumerate_forests(g) if forests is None else forests
    return all(is_acyclic(trace.result, trace.push(F)) for F in forests)
