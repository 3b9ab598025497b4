"""Monte Carlo cross-checks: Wilson's algorithm and rejection sampling.

Randomness comes from :class:`random.Random` (Mersenne Twister), seeded
explicitly, so a seed reproduces a report on any platform.  Floats appear
only in the sampling decisions and test statistics.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .errors import DisconnectedError, TooDenseError
from .exact import as_fraction
from .graph import Multigraph, UnionFind

ACCEPTANCE_FLOOR = 1e-4
TRIAL_WINDOW = 100_000


def wilson_ust(g: Multigraph, c=None, seed=None, rng: random.Random | None = None) -> frozenset:
    """A spanning tree with probability proportional to the product of conductances.

    Rooted at the lowest vertex id; walks step along an incident edge with
    probability proportional to its conductance and are loop-erased.
    """
    h = g if c is None else g.with_weights(c)
    if not h.is_connected():
        raise DisconnectedError("Wilson's algorithm needs a connected graph")
    rng = rng or random.Random(seed)
    steps = {}
    for x in h.vertices:
        inc = [e for e in h.incident(x) if not e.is_loop]
        steps[x] = ([(e.other(x), e.id) for e in inc], [float(e.weight) for e in inc])
    order = sorted(h.vertices)
    in_tree = {order[0]}
    nxt: dict = {}
    tree = set()
    for start in order[1:]:
        x = start
        while x not in in_tree:
            moves, weights = steps[x]
            y, eid = rng.choices(moves, weights)[0]
            nxt[x] = (y, eid)  # overwriting erases loops
            x = y
        x = start
        while x not in in_tree:
            in_tree.add(x)
            y, eid = nxt[x]
            tree.add(eid)
            x = y
    return frozenset(tree)


def ust_counts(g: Multigraph, n: int, seed, c=None) -> Counter:
    rng = random.Random(seed)
    return Counter(wilson_ust(g, c, rng=rng) for _ in range(n))


@dataclass
class SampleReport:
    n_samples: int
    edge_counts: dict
    pair_counts: dict
    trials: int
    seed: object = None

    @property
    def acceptance_rate(self) -> float:
        return self.n_samples / self.trials if self.trials else 0.0

    def frequency(self, *eids: int) -> float:
        if len(eids) == 1:
            return self.edge_counts[eids[0]] / self.n_samples
        return self.pair_counts[tuple(sorted(eids))] / self.n_samples

    @property
    def frequencies(self) -> dict:
        return {e: k / self.n_samples for e, k in self.edge_counts.items()}

    def merge(self, other: "SampleReport") -> "SampleReport":
        ec = Counter(self.edge_counts)
        ec.update(other.edge_counts)
        pc = Counter(self.pair_counts)
        pc.update(other.pair_counts)
        return SampleReport(
            self.n_samples + other.n_samples, dict(ec), dict(pc), self.trials + other.trials, None
        )


def arboreal_rejection(
    g: Multigraph,
    beta,
    seed,
    n: int,
    floor: float = ACCEPTANCE_FLOOR,
    window: int = TRIAL_WINDOW,
) -> SampleReport:
    """Bernoulli(beta/(1+beta)) bond configurations, keeping the acyclic ones.

    Raises :class:`TooDenseError` if after a full window of trials the
    acceptance rate is below ``floor``.
    """
    beta = as_fraction(beta)
    p = float(beta / (1 + beta))
    rng = random.Random(seed)
    edges = [e for e in g.edges]
    ids = sorted(e.id for e in edges)
    edge_counts = {e: 0 for e in ids}
    pair_counts = {pr: 0 for pr in combinations(ids, 2)}
    accepted = trials = 0
    while accepted < n:
        trials += 1
        uf = UnionFind(g.vertices)
        chosen = []
        ok = True
        for e in edges:
            if rng.random() < p:
                if not uf.union(e.u, e.v):
                    ok = False
                chosen.append(e.id)
        if ok:
            accepted += 1
            chosen.sort()
            for e in chosen:
                edge_counts[e] += 1
            for pr in combinations(chosen, 2):
                pair_counts[pr] += 1
        if trials % window == 0 and accepted / trials < floor:
            raise TooDenseError(
                f"acceptance rate {accepted / trials:.2e} below {floor:g}; use the exact methods"
            )
    return SampleReport(accepted, edge_counts, pair_counts, trials, seed)


@dataclass(frozen=True)
class MCEstimate:
    margin: float
    stderr: float
    report: SampleReport = field(repr=False)


def mc_nc_probe(g: Multigraph, beta, e1: int, e2: int, seed, n: int) -> MCEstimate:
    """Estimate P[e1]P[e2] - P[e1 e2] with a delta-method standard error; advisory only."""
    rep = arboreal_rejection(g, beta, seed, n)
    p1, p2, p12 = rep.frequency(e1), rep.frequency(e2), rep.frequency(e1, e2)
    grad = (p2, p1, -1.0)
    cov = [
        [p1 * (1 - p1), p12 - p1 * p2, p12 * (1 - p1)],
        [p12 - p1 * p2, p2 * (1 - p2), p12 * (1 - p2)],
        [p12 * (1 - p1), p12 * (1 - p2), p12 * (1 - p12)],
    ]
    var = sum(grad[i] * cov[i][j] * grad[j] for i in range(3) for j in range(3)) / rep.n_samples
    return MCEstimate(p1 * p2 - p12, math.sqrt(max(var, 0.0)), rep)
