"""Negative-correlation margins, large-beta coefficient analysis, and K_n closed forms.

Two polynomial conventions appear.  ``NCMargin.margin`` is

    mu[e1] mu[e2] - mu[e1 e2] mu[1]

with the required-edge weights divided out of mu.  ``NCMargin.prob_margin``
is ``Z^2 (P[e1] P[e2] - P[e1 e2])``, which equals ``beta_e1 beta_e2`` times
the former.  In ``prob_margin`` the spanning-tree term of a connected graph
sits at degree ``2|V| - 2`` and the two-tree forests term at ``2|V| - 3``;
those are the degrees the coefficient analyses index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import InvalidOperationError
from .exact import (
    BetaPolynomial,
    as_fraction,
    count_positive_roots,
    isolate_positive_roots,
    nonnegative_on_positive_reals,
    sign_changing_part,
)
from .electrical import tree_count
from .forest import EventSpec, mu, prob
from .graph import Multigraph, complete, is_acyclic

HOLDS = "holds"
VIOLATED = "violated"
IDENTICALLY_ZERO = "identically_zero"


@dataclass(frozen=True)
class NCMargin:
    margin: Fraction | BetaPolynomial
    verdict: str
    witnesses: dict
    alt_margin: Fraction | BetaPolynomial | None = None
    prob_margin: Fraction | BetaPolynomial | None = None

    @property
    def symbolic(self) -> bool:
        return isinstance(self.margin, BetaPolynomial)

    def coefficient(self, degree: int) -> Fraction:
        """Coefficient of beta**degree in ``prob_margin`` (symbolic mode only)."""
        if not isinstance(self.prob_margin, BetaPolynomial):
            raise TypeError("coefficients exist only for symbolic margins")
        return self.prob_margin.coeff(degree)


def _verdict(margin) -> str:
    if isinstance(margin, BetaPolynomial):
        if margin.is_zero():
            return IDENTICALLY_ZERO
        return HOLDS if nonnegative_on_positive_reals(margin) else VIOLATED
    return HOLDS if margin >= 0 else VIOLATED


def nc_pair(g: Multigraph, e1: int, e2: int, symbolic: bool = False) -> NCMargin:
    """Exact NC margin for a pair of distinct edges.

    Also computes ``mu[e1 ~e2] mu[~e1 e2] - mu[e1 e2] mu[~e1 ~e2]``; expanding
    ``mu[e1] = beta_e2 mu[e1 e2] + mu[e1 ~e2]`` and its companions shows the two
    forms are equal, which is asserted.
    """
    if e1 == e2:
        raise InvalidOperationError("nc_pair needs two distinct edges")

    def m(req=(), forb=()):
        return mu(g, EventSpec(req, forb), symbolic)

    z, m1, m2, both = m(), m([e1]), m([e2]), m([e1, e2])
    margin = m1 * m2 - both * z
    alt = m([e1], [e2]) * m([e2], [e1]) - both * m((), [e1, e2])
    if margin != alt:
        raise ArithmeticError(f"margin forms disagree: {margin} vs {alt}")
    if symbolic:
        prob_margin = margin.shift(2)
    else:
        prob_margin = margin * g.weight(e1) * g.weight(e2)
    witnesses = {"mu_e1": m1, "mu_e2": m2, "mu_e1e2": both, "mu_1": z}
    return NCMargin(margin, _verdict(margin), witnesses, alt, prob_margin)


def nc_all(g: Multigraph, symbolic: bool = False) -> dict[tuple[int, int], NCMargin]:
    return {(a, b): nc_pair(g, a, b, symbolic) for a, b in combinations(g.edge_ids, 2)}


def nc_sets(g: Multigraph, s1: Iterable[int], s2: Iterable[int]) -> NCMargin:
    """``P[S1] P[S2] - P[S1 S2]`` for disjoint edge sets, as an exact rational."""
    s1, s2 = frozenset(s1), frozenset(s2)
    if s1 & s2:
        raise ValueError("edge sets must be disjoint")
    p1 = prob(g, EventSpec(s1))
    p2 = prob(g, EventSpec(s2))
    p12 = prob(g, EventSpec(s1 | s2))
    margin = p1 * p2 - p12
    return NCMargin(margin, _verdict(margin), {"p_s1": p1, "p_s2": p2, "p_s1s2": p12})


def _tree(g: Multigraph, req: Sequence[int]) -> Fraction:
    if not is_acyclic(g, req):
        return Fraction(0)
    return tree_count(g, c=1, require=req)


@dataclass(frozen=True)
class LeadingCoefficient:
    lead: Fraction
    from_polynomial: Fraction
    interpretation: str
    tree_counts: dict = field(default_factory=dict)


def leading_coeff_analysis(g: Multigraph, e1: int, e2: int) -> LeadingCoefficient:
    """``T[e1] T[e2] - T[e1 e2] T[1]`` (unweighted spanning-tree counts).

    This is the coefficient of beta**(2|V|-2) of the probability-form margin;
    the value from the symbolic margin polynomial is computed independently
    and must agree.
    """
    if not g.is_connected():
        raise InvalidOperationError("leading coefficient analysis needs a connected graph")
    t1, ta, tb, tab = _tree(g, []), _tree(g, [e1]), _tree(g, [e2]), _tree(g, [e1, e2])
    lead = ta * tb - tab * t1
    poly = nc_pair(g.with_weights(1), e1, e2, symbolic=True)
    from_poly = poly.coefficient(2 * g.n - 2)
    if from_poly != lead:
        raise ArithmeticError(f"tree-count lead {lead} != polynomial coefficient {from_poly}")
    if lead > 0:
        interp = "positive"
    elif lead == 0:
        interp = "zero"
    else:
        interp = "negative"
    counts = {"T_1": t1, "T_e1": ta, "T_e2": tb, "T_e1e2": tab}
    return LeadingCoefficient(lead, from_poly, interp, counts)


def second_coeff(g: Multigraph, e1: int, e2: int) -> Fraction:
    """Coefficient of beta**(2|V|-3) in the probability-form margin polynomial."""
    if not g.is_connected():
        raise InvalidOperationError("second coefficient needs a connected graph")
    return nc_pair(g.with_weights(1), e1, e2, symbolic=True).coefficient(2 * g.n - 3)


def two_tree_forests(g: Multigraph, side: frozenset, req: Sequence[int]) -> Fraction:
    """Spanning forests with exactly two trees, one spanning ``side`` and one its complement, containing ``req``."""
    other = frozenset(g.vertices) - side
    ga, gb = g.induced(side), g.induced(other)
    ra = [e for e in req if e in ga]
    rb = [e for e in req if e in gb]
    if len(ra) + len(rb) != len(req):
        return Fraction(0)
    return _tree(ga, ra) * _tree(gb, rb)


def second_coeff_two_tree(g: Multigraph, e1: int, e2: int) -> Fraction:
    """Second coefficient from spanning-tree and two-tree forest counts.

    ``1/2 sum_{V'} T(e1)F_V'(e2) + T(e2)F_V'(e1) - T(e1e2)F_V'(1) - T(1)F_V'(e1e2)``
    over nonempty proper vertex subsets ``V'``.
    """
    g = g.with_weights(1)
    t1, ta, tb, tab = _tree(g, []), _tree(g, [e1]), _tree(g, [e2]), _tree(g, [e1, e2])
    verts = sorted(g.vertices)
    total = Fraction(0)
    for k in range(1, len(verts)):
        for side in combinations(verts, k):
            side = frozenset(side)
            total += (
                ta * two_tree_forests(g, side, [e2])
                + tb * two_tree_forests(g, side, [e1])
                - tab * two_tree_forests(g, side, [])
                - t1 * two_tree_forests(g, side, [e1, e2])
            )
    return total / 2


# -- complete graphs ----------------------------------------------------------


def _binom(a: int, b: int) -> int:
    return comb(a, b) if 0 <= b <= a else 0


def _pw(base: int, exp: int) -> Fraction:
    return Fraction(base) ** exp


def kn_case_sums(n: int, k: int) -> list[Fraction]:
    """The nine endpoint-placement sums of a_V' over |V'| = k for a disjoint pair in K_n.

    Order: both pairs inside; both outside; e1 + one end of e2 inside; e2 + one
    end of e1 inside; one end of e1 only; one end of e2 only; e1 inside and e2
    outside; e2 inside and e1 outside; one end of each inside.
    """
    N = _pw(n, n - 4)

    def term(coef, lower, a, b):
        c = _binom(n - 4, lower)
        if c == 0:
            return Fraction(0)
        return coef * c * N * _pw(k, a) * _pw(n - k, b)

    return [
        term(-4, k - 4, k - 4, n - k),
        term(-4, k, k, n - k - 4),
        term(8, k - 3, k - 3, n - k - 1),
        term(8, k - 3, k - 3, n - k - 1),
        term(8, k - 1, k - 1, n - k - 3),
        term(8, k - 1, k - 1, n - k - 3),
        term(-4, k - 2, k - 2, n - k - 2),
        term(-4, k - 2, k - 2, n - k - 2),
        term(-16, k - 2, k - 2, n - k - 2),
    ]


def kn_a(n: int, k: int) -> Fraction:
    """Closed form of sum_{|V'|=k} a_V' for a disjoint pair in K_n."""
    return (
        12
        * _pw(n, n - 3)
        * _binom(n - 4, k - 1)
        * _pw(k, k - 4)
        * _pw(n - k, n - k - 4)
        * Fraction(-k * (n + 6) * (n - k) + 2 * n * n, (n - k - 1) * (n - k - 2))
    )


def kn_I(n: int, k: int) -> Fraction:
    return (
        Fraction(factorial(n - 4), factorial(k - 1) * factorial(n - k - 1))
        * _pw(k, k - 4)
        * _pw(n - k, n - k - 4)
        * (k * (n + 6) * (n - k) - 2 * n * n)
        / _pw(n - 1, n - 5)
    )


def kn_a_direct(n: int, k: int) -> Fraction:
    """sum_{|V'|=k} a_V' on K_n by matrix-tree counts of both sides (e1 = 01, e2 = 23)."""
    g = complete(n)
    ids = {(e.u, e.v): e.id for e in g.edges}
    e1, e2 = ids[0, 1], ids[2, 3]
    t1, ta, tb, tab = _tree(g, []), _tree(g, [e1]), _tree(g, [e2]), _tree(g, [e1, e2])
    total = Fraction(0)
    for side in combinations(range(n), k):
        side = frozenset(side)
        total += (
            ta * two_tree_forests(g, side, [e2])
            + tb * two_tree_forests(g, side, [e1])
            - tab * two_tree_forests(g, side, [])
            - t1 * two_tree_forests(g, side, [e1, e2])
        )
    return total


@dataclass(frozen=True)
class KnAnalysis:
    """Closed-form second-coefficient data for a disjoint edge pair in K_n.

    ``second_coeff_literal`` is ``sum_{k=1}^{n//2} a_k``.  Summing over V' and
    halving counts each bipartition once, so for even n the k = n/2 class must
    enter with weight 1/2; ``second_coeff_from_cases`` does that and is the
    value that matches the polynomial coefficient.  For odd n they coincide.
    """

    n: int
    t1: Fraction
    te: Fraction
    tee: Fraction
    a: dict
    I: dict
    sum_I: Fraction
    sum_I_symmetric: Fraction
    second_coeff_literal: Fraction
    second_coeff_from_cases: Fraction
    cases_consistent: bool

    @property
    def sum_I_below_one(self) -> bool:
        return self.sum_I < 1


def kn_closed_forms(n: int) -> KnAnalysis:
    if n < 5:
        raise ValueError("closed forms need n >= 5 (the (n-k-1)(n-k-2) denominators vanish)")
    half = n // 2
    a = {k: kn_a(n, k) for k in range(1, half + 1)}
    I = {k: kn_I(n, k) for k in range(2, half + 1)}
    cases_ok = all(sum(kn_case_sums(n, k)) == a[k] for k in a)
    weight = {k: Fraction(1, 2) if 2 * k == n else Fraction(1) for k in a}
    literal = sum(a.values(), Fraction(0))
    symmetric = sum((weight[k] * a[k] for k in a), Fraction(0))
    sum_I = sum(I.values(), Fraction(0))
    sum_I_sym = sum((weight[k] * I[k] for k in I), Fraction(0))
    return KnAnalysis(
        n=n,
        t1=_pw(n, n - 2),
        te=2 * _pw(n, n - 3),
        tee=4 * _pw(n, n - 4),
        a=a,
        I=I,
        sum_I=sum_I,
        sum_I_symmetric=sum_I_sym,
        second_coeff_literal=literal,
        second_coeff_from_cases=symmetric,
        cases_consistent=cases_ok,
    )


def sum_I(n: int) -> Fraction:
    """sum_{k=2}^{n//2} I_k with one common denominator (fast for large n)."""
    if n < 5:
        raise ValueError("needs n >= 5")
    d = (n - 1) ** (n - 5)
    num = Fraction(0)
    for k in range(2, n // 2 + 1):
        num += (
            Fraction(factorial(n - 4), factorial(k - 1) * factorial(n - k - 1))
            * _pw(k, k - 4)
            * _pw(n - k, n - k - 4)
            * (k * (n + 6) * (n - k) - 2 * n * n)
        )
    return num / d


def ik_bound_threshold(n_hi: int = 500, n_lo: int = 5) -> tuple[int | None, dict[int, bool]]:
    """Smallest N0 with sum_I(n) < 1 for every n in [N0, n_hi]; also the per-n table."""
    table = {n: sum_I(n) < 1 for n in range(n_lo, n_hi + 1)}
    n0 = None
    for n in range(n_hi, n_lo - 1, -1):
        if not table[n]:
            break
        n0 = n
    return n0, table


# -- thresholds and sweeps ----------------------------------------------------


@dataclass(frozen=True)
class BetaThreshold:
    beta_star: Fraction | None
    side: str
    bracket: tuple[Fraction, Fraction] | None = None


def beta_threshold(
    g: Multigraph, e1: int, e2: int, width: Fraction = Fraction(1, 10**9)
) -> BetaThreshold:
    """Where the symbolic margin becomes nonnegative for good.

    ``side`` is ``all_beta`` if the margin is >= 0 on all of (0, inf),
    ``large_beta`` if it is eventually positive with ``beta_star`` the upper
    end of a bracket around the last sign change, and ``unknown`` if it is
    negative for large beta.
    """
    margin = nc_pair(g.with_weights(1), e1, e2, symbolic=True).margin
    if margin.is_zero() or nonnegative_on_positive_reals(margin):
        return BetaThreshold(None, "all_beta")
    if margin.leading < 0:
        return BetaThreshold(None, "unknown")
    changing = sign_changing_part(margin)
    brackets = isolate_positive_roots(changing, width)
    lo, hi = brackets[-1]
    if not margin(2 * hi) > 0:
        raise ArithmeticError(f"margin not positive beyond the last root bracket ({lo}, {hi}]")
    return BetaThreshold(hi, "large_beta", (lo, hi))


@dataclass(frozen=True)
class MonotonicityReport:
    grid: list
    values: list
    non_increasing: bool
    violation_at: int | None


def monotonicity_check(g: Multigraph, e0: int, e: int, grid: Iterable) -> MonotonicityReport:
    """P[e0] as beta_e sweeps ``grid`` with all other weights fixed."""
    if e0 == e:
        raise ValueError("e0 and e must differ")
    grid = [as_fraction(x) for x in grid]
    values = [prob(g.with_weights({e: x}), EventSpec([e0])) for x in grid]
    bad = next((i for i in range(1, len(values)) if values[i] > values[i - 1]), None)
    return MonotonicityReport(grid, values, bad is None, bad)


SMALL_BETA_GRID = tuple(Fraction(1, 10**k) for k in range(1, 5))


def small_beta_probe(g: Multigraph, e1: int, e2: int, grid=SMALL_BETA_GRID) -> list[tuple[Fraction, Fraction]]:
    """Exact margins at small uniform beta; an empirical probe, not a verdict."""
    return [(b, nc_pair(g.with_weights(b), e1, e2).margin) for b in grid]


def random_disjoint_sets(edge_ids: Sequence[int], rng: random.Random) -> tuple[frozenset, frozenset]:
    ids = list(edge_ids)
    s1, s2 = set(), set()
    for e in ids:
        r = rng.random()
        if r < 1 / 3:
            s1.add(e)
        elif r < 2 / 3:
            s2.add(e)
    return frozenset(s1), frozenset(s2)


__all__ = [
    "NCMargin",
    "nc_pair",
    "nc_all",
    "nc_sets",
    "LeadingCoefficient",
    "leading_coeff_analysis",
    "second_coeff",
    "second_coeff_two_tree",
    "two_tree_forests",
    "kn_case_sums",
    "kn_a",
    "kn_I",
    "kn_a_direct",
    "KnAnalysis",
    "kn_closed_forms",
    "sum_I",
    "ik_bound_threshold",
    "BetaThreshold",
    "beta_threshold",
    "MonotonicityReport",
    "monotonicity_check",
    "small_beta_probe",
    "count_positive_roots",
]
