"""Multigraphs with stable edge ids, structural edits, generators and I/O.

Vertex ids are integers.  Edge ids are integers assigned once and never
reused: edits return a new graph together with an :class:`EdgeMap` saying
where each old edge went.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import GraphFormatError, InvalidOperationError, SizeLimitError
from .exact import as_fraction, fmt


class Edge(NamedTuple):
    id: int
    u: int
    v: int
    weight: Fraction
    label: str | None = None

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Multigraph:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    next_id: int = 0
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        index = {}
        for e in self.edges:
            if e.id in index:
                raise ValueError(f"duplicate edge id {e.id}")
            if e.u not in vs or e.v not in vs:
                raise ValueError(f"edge {e.id} has an endpoint outside the vertex set")
            if not e.weight > 0:
                raise ValueError(f"edge {e.id} has non-positive weight {e.weight}")
            index[e.id] = e
        object.__setattr__(self, "_index", index)
        nxt = max(self.next_id, max(index, default=-1) + 1)
        object.__setattr__(self, "next_id", nxt)

    @classmethod
    def from_edges(cls, n_or_vertices, edges: Iterable, weight=1) -> "Multigraph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples; ids follow list order."""
        if isinstance(n_or_vertices, int):
            vertices = tuple(range(n_or_vertices))
        else:
            vertices = tuple(n_or_vertices)
        out = []
        for i, item in enumerate(edges):
            u, v = item[0], item[1]
            w = as_fraction(item[2]) if len(item) > 2 else as_fraction(weight)
            out.append(Edge(i, u, v, w))
        return cls(vertices, tuple(out))

    # -- queries -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, eid: int) -> Edge:
        try:
            return self._index[eid]
        except KeyError:
            raise KeyError(f"no edge with id {eid}") from None

    def __contains__(self, eid) -> bool:
        return eid in self._index

    def weight(self, eid: int) -> Fraction:
        return self.edge(eid).weight

    def weights(self) -> dict[int, Fraction]:
        return {e.id: e.weight for e in self.edges}

    def loops(self) -> list[int]:
        return [e.id for e in self.edges if e.is_loop]

    def degree(self, x: int) -> int:
        """Number of edge ends at ``x``; a loop counts twice."""
        return sum((e.u == x) + (e.v == x) for e in self.edges)

    def incident(self, x: int) -> list[Edge]:
        return [e for e in self.edges if e.u == x or e.v == x]

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """``vertex -> [(neighbour, edge_id), ...]``, loops omitted."""
        adj = {x: [] for x in self.vertices}
        for e in self.edges:
            if e.is_loop:
                continue
            adj[e.u].append((e.v, e.id))
            adj[e.v].append((e.u, e.id))
        return adj

    def is_uniform(self) -> bool:
        return len({e.weight for e in self.edges}) <= 1

    def is_simple(self) -> bool:
        seen = set()
        for e in self.edges:
            key = frozenset((e.u, e.v))
            if e.is_loop or key in seen:
                return False
            seen.add(key)
        return True

    def is_connected(self) -> bool:
        return len(components(self)) <= 1

    # -- edits ---------------------------------------------------------

    def with_weights(self, weights: Mapping[int, object] | object) -> "Multigraph":
        """Copy with new weights: a mapping (partial) or one uniform value."""
        if isinstance(weights, Mapping):
            new = tuple(
                e._replace(weight=as_fraction(weights[e.id])) if e.id in weights else e
                for e in self.edges
            )
        else:
            w = as_fraction(weights)
            new = tuple(e._replace(weight=w) for e in self.edges)
        return replace(self, edges=new)

    def delete_edges(self, eids: Iterable[int]) -> "Multigraph":
        drop = set(eids)
        missing = drop - set(self._index)
        if missing:
            raise KeyError(f"no edges with ids {sorted(missing)}")
        return replace(self, edges=tuple(e for e in self.edges if e.id not in drop))

    def drop_loops(self) -> "Multigraph":
        return self.delete_edges(self.loops())

    def delete_vertices(self, xs: Iterable[int]) -> "Multigraph":
        xs = set(xs)
        return replace(
            self,
            vertices=tuple(v for v in self.vertices if v not in xs),
            edges=tuple(e for e in self.edges if e.u not in xs and e.v not in xs),
        )

    def induced(self, xs: Iterable[int]) -> "Multigraph":
        keep = set(xs)
        return self.delete_vertices(v for v in self.vertices if v not in keep)

    def add_edge(self, u: int, v: int, weight, label=None) -> tuple["Multigraph", int]:
        eid = self.next_id
        e = Edge(eid, u, v, as_fraction(weight), label)
        return replace(self, edges=self.edges + (e,), next_id=eid + 1), eid

    def relabel(self) -> "Multigraph":
        """Vertices renamed to 0..n-1 (sorted order), edges renumbered in order."""
        pos = {x: i for i, x in enumerate(sorted(self.vertices))}
        edges = tuple(
            Edge(i, pos[e.u], pos[e.v], e.weight, e.label) for i, e in enumerate(self.edges)
        )
        return Multigraph(tuple(range(self.n)), edges)


@dataclass(frozen=True)
class EdgeMap:
    """Edge-id map between two graphs; ``dropped`` lists source edges with no image."""

    pairs: Mapping[int, int]
    dropped: frozenset = frozenset()

    def __call__(self, eid: int) -> int | None:
        if eid in self.dropped:
            return None
        return self.pairs[eid]

    def preimage(self, target: int) -> list[int]:
        return sorted(s for s, t in self.pairs.items() if t == target)

    def then(self, other: "EdgeMap") -> "EdgeMap":
        """Composition: apply ``self`` first, then ``other``."""
        pairs = {}
        dropped = set(self.dropped)
        for s, t in self.pairs.items():
            if t in other.dropped:
                dropped.add(s)
            else:
                pairs[s] = other.pairs[t]
        return EdgeMap(pairs, frozenset(dropped))

    @classmethod
    def identity(cls, eids: Iterable[int]) -> "EdgeMap":
        return cls({e: e for e in eids})


class UnionFind:
    """Disjoint sets with path halving and union by rank."""

    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        """Merge the classes of a and b; False if they were already one class."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True

    def copy(self) -> "UnionFind":
        uf = UnionFind.__new__(UnionFind)
        uf.parent = dict(self.parent)
        uf.rank = dict(self.rank)
        return uf


def is_acyclic(g: Multigraph, eids: Iterable[int]) -> bool:
    uf = UnionFind(g.vertices)
    for eid in eids:
        e = g.edge(eid)
        if not uf.union(e.u, e.v):
            return False
    return True


def components(g: Multigraph) -> list[frozenset]:
    uf = UnionFind(g.vertices)
    for e in g.edges:
        uf.union(e.u, e.v)
    classes: dict = {}
    for x in g.vertices:
        classes.setdefault(uf.find(x), set()).add(x)
    return sorted((frozenset(c) for c in classes.values()), key=min)


def bridges(g: Multigraph) -> set[int]:
    """Pivotal edges: those whose endpoints are disconnected once the edge is removed.

    Iterative Tarjan low-link keyed on edge ids, so a parallel partner is
    correctly seen as a back edge.
    """
    adj = g.adjacency()
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out = set()
    timer = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            x, via, it = stack[-1]
            for y, eid in it:
                if eid == via:
                    continue
                if y in disc:
                    low[x] = min(low[x], disc[y])
                else:
                    disc[y] = low[y] = timer
                    timer += 1
                    stack.append((y, eid, iter(adj[y])))
                    break
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[x])
                    if low[x] > disc[parent]:
                        out.add(via)
    return out


def contract(g: Multigraph, eid: int, drop_loops: bool = True) -> tuple[Multigraph, EdgeMap]:
    """Identify the endpoints of ``eid``; the smaller vertex id survives.

    ``eid`` itself is listed as dropped.  With ``drop_loops`` every loop at the
    merged vertex is dropped too; loops elsewhere are kept.
    """
    e = g.edge(eid)
    if e.is_loop:
        raise InvalidOperationError(f"cannot contract self-loop {eid}")
    keep, gone = min(e.u, e.v), max(e.u, e.v)
    edges = []
    pairs = {}
    dropped = {eid}
    for f in g.edges:
        if f.id == eid:
            continue
        u = keep if f.u == gone else f.u
        v = keep if f.v == gone else f.v
        if u == v and drop_loops and u == keep:
            dropped.add(f.id)
            continue
        edges.append(f._replace(u=u, v=v))
        pairs[f.id] = f.id
    h = Multigraph(tuple(x for x in g.vertices if x != gone), tuple(edges), g.next_id)
    return h, EdgeMap(pairs, frozenset(dropped))


def contract_set(g: Multigraph, eids: Iterable[int], drop_loops: bool = True) -> Multigraph:
    for eid in eids:
        if eid in g:
            g, _ = contract(g, eid, drop_loops)
    return g


# -- generators ---------------------------------------------------------


def complete(n: int, weight=1) -> Multigraph:
    return Multigraph.from_edges(n, combinations(range(n), 2), weight)


def path(n: int, weight=1) -> Multigraph:
    return Multigraph.from_edges(n, ((i, i + 1) for i in range(n - 1)), weight)


def cycle(n: int, weight=1) -> Multigraph:
    if n < 2:
        raise ValueError("cycle needs n >= 2")
    return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], weight)


def ladder(d: int, weight=1) -> Multigraph:
    """{1..d} x {0,1}: vertex (i, s) has id 2*(i-1)+s; rungs then rails."""
    rungs = [(2 * i, 2 * i + 1) for i in range(d)]
    rails = [(2 * i + s, 2 * (i + 1) + s) for i in range(d - 1) for s in (0, 1)]
    return Multigraph.from_edges(2 * d, rungs + rails, weight)


def complete_bipartite(a: int, b: int, weight=1) -> Multigraph:
    return Multigraph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)], weight)


def bowtie(weight=1) -> Multigraph:
    """Two triangles sharing vertex 2."""
    return Multigraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)], weight)


GENERATORS = {
    "complete": complete,
    "path": path,
    "cycle": cycle,
    "ladder": ladder,
    "complete_bipartite": complete_bipartite,
    "bowtie": bowtie,
}


def generate(kind: str, *sizes: int, weight=1) -> Multigraph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}") from None
    if any(s < 1 for s in sizes):
        raise ValueError("size parameters must be >= 1")
    return fn(*sizes, weight=weight)


def parse_generator(spec: str, weight=1) -> Multigraph:
    """``"complete:4"``, ``"complete_bipartite:2,3"``, ``"bowtie"``."""
    kind, _, args = spec.partition(":")
    sizes = [int(a) for a in args.replace(",", ":").split(":") if a]
    return generate(kind.strip(), *sizes, weight=weight)


# -- canonical forms and small-graph enumeration -----------------------


def _multiplicity(g: Multigraph) -> tuple[list[int], dict]:
    verts = sorted(g.vertices)
    pos = {x: i for i, x in enumerate(verts)}
    mult: dict = {}
    for e in g.edges:
        a, b = sorted((pos[e.u], pos[e.v]))
        mult[a, b] = mult.get((a, b), 0) + 1
    return verts, mult


def canonical_code(g: Multigraph) -> tuple:
    """Isomorphism invariant of the unweighted multigraph.

    The minimum multiplicity code over vertex orderings that list vertices by
    increasing (degree, loop count, sorted neighbour degrees); the minimum is
    taken by brute force over all orderings within each class.
    """
    verts, mult = _multiplicity(g)
    n = len(verts)
    deg = [0] * n
    for (a, b), k in mult.items():
        deg[a] += k
        deg[b] += k
    nbrs = [[] for _ in range(n)]
    for (a, b), k in mult.items():
        if a != b:
            nbrs[a].extend([deg[b]] * k)
            nbrs[b].extend([deg[a]] * k)
    inv = [(deg[i], mult.get((i, i), 0), tuple(sorted(nbrs[i]))) for i in range(n)]
    classes: dict = {}
    for i in range(n):
        classes.setdefault(inv[i], []).append(i)
    keys = sorted(classes)
    best = None
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    for choice in product(*(permutations(classes[k]) for k in keys)):
        order = [x for block in choice for x in block]
        code = tuple(
            mult.get((min(order[i], order[j]), max(order[i], order[j])), 0) for i, j in pairs
        )
        if best is None or code < best:
            best = code
    return (n, tuple(keys), best)


def is_isomorphic(g: Multigraph, h: Multigraph) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    return canonical_code(g) == canonical_code(h)


def _graph_from_mask(n: int, pairs, mask: int) -> Multigraph:
    return Multigraph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])


def _connected_mask(n: int, pairs, mask: int) -> bool:
    uf = UnionFind(range(n))
    comps = n
    for i, (a, b) in enumerate(pairs):
        if mask >> i & 1 and uf.union(a, b):
            comps -= 1
    return comps == 1


def connected_graphs(n: int, dedup: bool = True) -> Iterator[Multigraph]:
    """Connected simple graphs on exactly ``n`` vertices, as subsets of K_n's edges.

    With ``dedup`` one representative per isomorphism class is produced, by
    growing graphs one edge at a time and keeping one per canonical code.
    """
    if n > 8:
        raise SizeLimitError("small-graph enumeration is limited to n <= 8")
    pairs = list(combinations(range(n), 2))
    if n == 1:
        yield Multigraph((0,), ())
        return
    if not dedup:
        for mask in range(1 << len(pairs)):
            if _connected_mask(n, pairs, mask):
                yield _graph_from_mask(n, pairs, mask)
        return
    level = {canonical_code(Multigraph(tuple(range(n)), ())): 0}
    for _ in range(len(pairs)):
        nxt: dict = {}
        for mask in level.values():
            for i in range(len(pairs)):
                if mask >> i & 1:
                    continue
                m2 = mask | 1 << i
                code = canonical_code(_graph_from_mask(n, pairs, m2))
                nxt.setdefault(code, m2)
        for mask in sorted(nxt.values()):
            if _connected_mask(n, pairs, mask):
                yield _graph_from_mask(n, pairs, mask)
        level = nxt


def enumerate_small_graphs(n_max: int, dedup: bool = True, n_min: int = 2) -> Iterator[Multigraph]:
    """Connected simple graphs with ``n_min <= n <= n_max`` vertices."""
    if n_max > 8:
        raise SizeLimitError("small-graph enumeration is limited to n_max <= 8")
    for n in range(n_min, n_max + 1):
        yield from connected_graphs(n, dedup)


# -- text format ----------------------------------------------------------


def read_graph(text: str) -> Multigraph:
    """Parse the line format: ``vertices <n>`` then ``<u> <v> <num>/<den> [label]``."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "vertices":
                raise GraphFormatError("expected header 'vertices <n>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise GraphFormatError("vertex count must be >= 1", lineno)
            continue
        if len(parts) not in (3, 4):
            raise GraphFormatError("expected '<u> <v> <num>/<den> [label]'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
            w = Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise GraphFormatError(f"cannot parse edge {line!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
        if w <= 0:
            raise GraphFormatError("edge weight must be positive", lineno)
        label = parts[3] if len(parts) == 4 else None
        edges.append(Edge(len(edges), u, v, w, label))
    if n is None:
        raise GraphFormatError("missing 'vertices <n>' header")
    return Multigraph(tuple(range(n)), tuple(edges))


def write_graph(g: Multigraph) -> str:
    """Serialize; vertices are relabelled 0..n-1 and edges written in id order."""
    pos = {x: i for i, x in enumerate(sorted(g.vertices))}
    lines = [f"vertices {g.n}"]
    for e in g.edges:
        line = f"{pos[e.u]} {pos[e.v]} {fmt(e.weight)}"
        if e.label:
            line += f" {e.label}"
        lines.append(line)
    return "\n".join(lines) + "\n"
