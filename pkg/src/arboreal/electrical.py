"""Exact electrical-network quantities on multigraphs.

Conductances default to the graph's edge weights.  Ohm's law is used in the
form ``i(e) = c(e) * (phi(tail) - phi(head))``: current is conductance times
potential drop.  Parallel edges are merged (conductances add) when the
Laplacian is built; per-edge currents are then recovered edge by edge, which
splits a parallel class in proportion to conductance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DisconnectedError, InvalidOperationError, SizeLimitError
from .exact import as_fraction, det_fraction_free, solve_exact
from .graph import Multigraph, components, contract, contract_set, is_acyclic

MAX_CYCLE_SEARCH_VERTICES = 12


def with_conductances(g: Multigraph, c: Mapping[int, object] | object | None = None) -> Multigraph:
    """``g`` with its weights replaced by ``c`` (mapping, scalar, or None to keep)."""
    if c is None:
        return g
    return g.with_weights(c)


def laplacian(g: Multigraph) -> tuple[list[int], list[list[Fraction]]]:
    """Weighted Laplacian over sorted vertex order; loops ignored, parallels summed."""
    order = sorted(g.vertices)
    pos = {x: i for i, x in enumerate(order)}
    n = len(order)
    L = [[Fraction(0)] * n for _ in range(n)]
    for e in g.edges:
        if e.is_loop:
            continue
        a, b = pos[e.u], pos[e.v]
        L[a][b] -= e.weight
        L[b][a] -= e.weight
        L[a][a] += e.weight
        L[b][b] += e.weight
    return order, L


def _minor(L, k):
    return [row[:k] + row[k + 1:] for i, row in enumerate(L) if i != k]


def tree_count(
    g: Multigraph,
    c=None,
    require: Iterable[int] = (),
    forbid: Iterable[int] = (),
) -> Fraction:
    """Weighted spanning-tree sum over trees T with require <= T, T & forbid = {}.

    The conductances of the required edges are divided out, i.e. this is the
    matrix-tree determinant of g / require minus forbid.
    """
    require, forbid = frozenset(require), frozenset(forbid)
    if require & forbid:
        raise InvalidOperationError("required and forbidden edges overlap")
    h = with_conductances(g, c)
    if not is_acyclic(h, require):
        raise InvalidOperationError(f"required edges {sorted(require)} contain a cycle")
    h = contract_set(h, require, drop_loops=True)
    h = h.delete_edges(e for e in forbid if e in h)
    if h.n <= 1:
        return Fraction(1)
    _, L = laplacian(h)
    return det_fraction_free(_minor(L, 0))


def ust_edge_probability(g: Multigraph, eid: int, c=None) -> Fraction:
    """P[e in T] for the conductance-weighted spanning tree measure."""
    h = with_conductances(g, c)
    if h.edge(eid).is_loop:
        return Fraction(0)
    return h.weight(eid) * tree_count(h, require=[eid]) / tree_count(h)


@dataclass(frozen=True)
class CurrentFlow:
    """Unit current from ``source`` to ``sink``.

    ``current[eid]`` is oriented from the edge's stored ``u`` to ``v``;
    ``potential`` is grounded at the sink and only covers the terminals'
    component.
    """

    source: int
    sink: int
    potential: dict
    current: dict
    endpoints: dict = field(repr=False)

    def along(self, eid: int, tail: int) -> Fraction:
        """Current through ``eid`` in the direction leaving ``tail``."""
        u, _ = self.endpoints[eid]
        i = self.current[eid]
        return i if tail == u else -i

    def flow(self, a: int, b: int) -> Fraction:
        """Net current from a to b summed over all parallel edges; antisymmetric."""
        total = Fraction(0)
        for eid, (u, v) in self.endpoints.items():
            if (u, v) == (a, b):
                total += self.current[eid]
            elif (u, v) == (b, a):
                total -= self.current[eid]
        return total

    def net_out(self, x: int) -> Fraction:
        total = Fraction(0)
        for eid, (u, v) in self.endpoints.items():
            if u == v:
                continue
            if u == x:
                total += self.current[eid]
            elif v == x:
                total -= self.current[eid]
        return total

    @property
    def resistance(self) -> Fraction:
        return self.potential[self.source]


def _terminal_component(g: Multigraph, u: int, v: int) -> Multigraph:
    if u == v:
        raise InvalidOperationError("terminals must be distinct")
    for comp in components(g):
        if u in comp:
            if v not in comp:
                raise DisconnectedError(f"vertices {u} and {v} are disconnected")
            return g.induced(comp)
    raise KeyError(f"unknown vertex {u}")


def unit_current_flow(g: Multigraph, u: int, v: int, c=None) -> CurrentFlow:
    h = with_conductances(g, c)
    comp = _terminal_component(h, u, v)
    order, L = laplacian(comp)
    k = order.index(v)
    rhs = [Fraction(int(x == u)) for x in order]
    del rhs[k]
    sol = solve_exact(_minor(L, k), rhs)
    phi = {x: Fraction(0) for x in order}
    for x, val in zip(order[:k] + order[k + 1:], sol):
        phi[x] = val
    current = {}
    for e in h.edges:
        if e.u in phi and not e.is_loop:
            current[e.id] = e.weight * (phi[e.u] - phi[e.v])
        else:
            current[e.id] = Fraction(0)
    endpoints = {e.id: (e.u, e.v) for e in h.edges}
    return CurrentFlow(u, v, phi, current, endpoints)


def effective_resistance(g: Multigraph, u: int, v: int, c=None) -> Fraction:
    """Potential at ``u`` when a unit current enters at ``u`` and ``v`` is grounded."""
    return unit_current_flow(g, u, v, c).resistance


def energy(flow: CurrentFlow, g: Multigraph, c=None) -> Fraction:
    h = with_conductances(g, c)
    return sum((flow.current[e.id] ** 2 / e.weight for e in h.edges if not e.is_loop), Fraction(0))


def kirchhoff_residuals(flow: CurrentFlow, g: Multigraph, c=None) -> dict[str, Fraction]:
    """Largest absolute violation of each law; all zero for an exact unit flow.

    ``potential`` is checked without the solved potentials: currents divided by
    conductances are summed around the fundamental cycles of a BFS tree.
    """
    h = with_conductances(g, c)
    inside = set(flow.potential)
    res = {"current": Fraction(0), "source": Fraction(0), "sink": Fraction(0),
           "ohm": Fraction(0), "potential": Fraction(0)}
    for x in inside:
        net = flow.net_out(x)
        if x == flow.source:
            res["source"] = abs(net - 1)
        elif x == flow.sink:
            res["sink"] = abs(net + 1)
        else:
            res["current"] = max(res["current"], abs(net))
    phi = flow.potential
    for e in h.edges:
        if e.is_loop or e.u not in inside:
            continue
        res["ohm"] = max(res["ohm"], abs(flow.current[e.id] - e.weight * (phi[e.u] - phi[e.v])))
    # rebuild a potential from currents along a BFS tree, then test every edge
    adj = {x: [] for x in inside}
    for e in h.edges:
        if not e.is_loop and e.u in inside:
            adj[e.u].append(e)
            adj[e.v].append(e)
    root = flow.sink
    psi = {root: Fraction(0)}
    queue = [root]
    tree = set()
    while queue:
        x = queue.pop(0)
        for e in adj[x]:
            y = e.other(x)
            if y not in psi:
                drop = flow.current[e.id] / e.weight  # phi(u) - phi(v)
                psi[y] = psi[x] - drop if y == e.v else psi[x] + drop
                tree.add(e.id)
                queue.append(y)
    for e in h.edges:
        if e.is_loop or e.u not in inside or e.id in tree:
            continue
        cycle_sum = (psi[e.u] - psi[e.v]) - flow.current[e.id] / e.weight
        res["potential"] = max(res["potential"], abs(cycle_sum))
    return res


def contracted_resistance(g: Multigraph, u: int, v: int, eid: int, c=None) -> Fraction:
    """Effective resistance between u and v in g / eid (zero if they merge)."""
    h = with_conductances(g, c)
    e = h.edge(eid)
    if e.is_loop:
        return effective_resistance(h, u, v)
    h2, _ = contract(h, eid, drop_loops=True)
    keep, gone = min(e.u, e.v), max(e.u, e.v)
    u2 = keep if u == gone else u
    v2 = keep if v == gone else v
    if u2 == v2:
        return Fraction(0)
    return effective_resistance(h2, u2, v2)


@dataclass(frozen=True)
class RayleighReport:
    edge: int
    bumps: list
    resistances: list
    current: Fraction
    strictly_decreasing: bool
    constant: bool

    @property
    def consistent(self) -> bool:
        """Strict decrease when current flows through the edge, constancy otherwise."""
        return self.strictly_decreasing if self.current != 0 else self.constant


def rayleigh_check(g: Multigraph, u: int, v: int, e0: int, bumps, c=None) -> RayleighReport:
    bumps = [as_fraction(b) for b in bumps]
    if any(b <= 0 for b in bumps) or any(b2 <= b1 for b1, b2 in zip(bumps, bumps[1:])):
        raise ValueError("bumps must be positive and strictly increasing")
    h = with_conductances(g, c)
    flows = [unit_current_flow(h.with_weights({e0: b}), u, v) for b in bumps]
    values = [f.resistance for f in flows]
    current = flows[0].current[e0]
    return RayleighReport(
        e0,
        bumps,
        values,
        current,
        strictly_decreasing=all(b < a for a, b in zip(values, values[1:])),
        constant=len(set(values)) == 1,
    )


def _share_endpoint(g: Multigraph, e1: int, e2: int) -> bool:
    a, b = g.edge(e1), g.edge(e2)
    return bool({a.u, a.v} & {b.u, b.v})


def has_simple_cycle_through(g: Multigraph, e1: int, e2: int) -> bool:
    """Exhaustive DFS over simple paths closing ``e1`` into a cycle that uses ``e2``."""
    if g.n > MAX_CYCLE_SEARCH_VERTICES:
        raise SizeLimitError(f"simple-cycle search limited to {MAX_CYCLE_SEARCH_VERTICES} vertices")
    a = g.edge(e1)
    if a.is_loop or g.edge(e2).is_loop:
        return False
    adj = g.adjacency()
    start, goal = a.u, a.v

    seen = {start}

    def dfs(x, used_e2):
        for y, eid in adj[x]:
            if eid == e1:
                continue
            if y == goal:
                if used_e2 or eid == e2:
                    return True
                continue
            if y in seen:
                continue
            seen.add(y)
            if dfs(y, used_e2 or eid == e2):
                return True
            seen.discard(y)
        return False

    return dfs(start, False)


def shared_cycle_current(g: Multigraph, e1: int, e2: int, c=None) -> tuple[bool, Fraction]:
    """(simple cycle through both edges?, current in e2 for a unit flow across e1).

    The flow runs from e1's stored ``u`` to its ``v``; the current is reported
    along e2's stored orientation.
    """
    if e1 == e2 or not _share_endpoint(g, e1, e2):
        raise InvalidOperationError("e1 and e2 must be distinct adjacent edges")
    h = with_conductances(g, c)
    a = h.edge(e1)
    flow = unit_current_flow(h, a.u, a.v)
    return has_simple_cycle_through(h, e1, e2), flow.current[e2]
