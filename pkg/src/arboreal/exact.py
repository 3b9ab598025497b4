"""Exact scalars, polynomials in a formal beta, and exact linear algebra.

Scalars are :class:`fractions.Fraction` throughout; ``Fraction`` is always
normalized, so equality and ordering are exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import lcm
from typing import Iterable, Sequence, Union

from .errors import DimensionError, SingularMatrixError

Scalar = Union[int, Fraction]
Matrix = Sequence[Sequence[Scalar]]


def as_fraction(x) -> Fraction:
    """Parse ``int``, ``Fraction`` or a ``"p/q"`` literal into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def fmt(x: Fraction | int) -> str:
    """Serialize an exact rational as an integer-ratio string."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class BetaPolynomial:
    """Dense univariate polynomial in beta with rational coefficients.

    ``coeffs[k]`` is the coefficient of beta**k.  Instances are immutable and
    trailing zero coefficients are stripped on construction.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("BetaPolynomial is immutable")

    @classmethod
    def beta(cls) -> "BetaPolynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Scalar) -> "BetaPolynomial":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Index of the highest nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def low_order(self) -> int:
        """Multiplicity of beta = 0 as a root (0 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return 0

    def shift(self, k: int) -> "BetaPolynomial":
        """Multiply by beta**k (k >= 0) or divide exactly by beta**-k."""
        if k >= 0:
            return BetaPolynomial((0,) * k + self.coeffs)
        if any(c != 0 for c in self.coeffs[:-k]):
            raise ArithmeticError("division by a beta power is not exact")
        return BetaPolynomial(self.coeffs[-k:])

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @staticmethod
    def _lift(other) -> "BetaPolynomial":
        if isinstance(other, BetaPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return BetaPolynomial((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return BetaPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return BetaPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return BetaPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return BetaPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = BetaPolynomial((1,))
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self) -> "BetaPolynomial":
        return BetaPolynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def divmod(self, other: "BetaPolynomial") -> tuple["BetaPolynomial", "BetaPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = other.leading
        while len(rem) > other.degree and any(rem):
            shift = len(rem) - 1 - other.degree
            q = rem[-1] / lead
            quot[shift] = q
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= q * c
            rem.pop()
        return BetaPolynomial(quot), BetaPolynomial(rem)

    def to_strings(self) -> list[str]:
        return [fmt(c) for c in self.coeffs]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "b" if k == 1 else f"b^{k}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)


def poly_arith(a: BetaPolynomial, b: BetaPolynomial, op: str) -> BetaPolynomial:
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__}
    if op not in ops:
        raise ValueError(f"unknown polynomial op {op!r}")
    return ops[op](b)


def _gcd(a: BetaPolynomial, b: BetaPolynomial) -> BetaPolynomial:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a * (1 / a.leading) if not a.is_zero() else a


def squarefree(p: BetaPolynomial) -> BetaPolynomial:
    if p.degree <= 0:
        return p
    g = _gcd(p, p.derivative())
    return p.divmod(g)[0] if g.degree > 0 else p


def squarefree_decomposition(p: BetaPolynomial) -> list[tuple[BetaPolynomial, int]]:
    """Yun's algorithm: monic ``(f, k)`` pairs with p = lead * prod f**k, f squarefree and coprime."""
    if p.degree <= 0:
        return []
    out = []
    a = _gcd(p, p.derivative())
    b = p.divmod(a)[0]
    c = p.derivative().divmod(a)[0]
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        f = _gcd(b, d)
        if f.degree > 0:
            out.append((f, k))
        b = b.divmod(f)[0]
        c = d.divmod(f)[0]
        d = c - b.derivative()
        k += 1
    return out


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sturm_chain(p: BetaPolynomial) -> list[BetaPolynomial]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        r = chain[-2].divmod(chain[-1])[1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _variations(chain, x) -> int:
    signs = [s for s in (_sign(q(x)) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _cauchy_bound(p: BetaPolynomial) -> Fraction:
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def count_positive_roots(p: BetaPolynomial) -> int:
    """Number of distinct roots of ``p`` in (0, inf)."""
    if p.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    q = squarefree(p.shift(-p.low_order()))
    if q.degree <= 0:
        return 0
    chain = _sturm_chain(q)
    return _variations(chain, Fraction(0)) - _variations(chain, _cauchy_bound(q))


def sign_changing_part(p: BetaPolynomial) -> BetaPolynomial:
    """Product of the odd-multiplicity squarefree factors: exactly the roots where p changes sign."""
    out = BetaPolynomial((1,))
    for f, k in squarefree_decomposition(p):
        if k % 2:
            out = out * f
    return out


def nonnegative_on_positive_reals(p: BetaPolynomial) -> bool:
    """True iff p(x) >= 0 for every x > 0."""
    if p.is_zero():
        return True
    if p.coeff(p.low_order()) < 0:
        return False
    return count_positive_roots(sign_changing_part(p)) == 0


def isolate_positive_roots(
    p: BetaPolynomial, width: Fraction = Fraction(1, 10**12)
) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(lo, hi]`` each holding exactly one distinct root in (0, inf).

    Uses a Sturm chain of the squarefree part and exact bisection down to
    ``width``.  Intervals are returned in increasing order.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    q = squarefree(p.shift(-p.low_order()))
    if q.degree <= 0:
        return []
    chain = _sturm_chain(q)

    def count(lo, hi):
        return _variations(chain, lo) - _variations(chain, hi)

    stack = [(Fraction(0), _cauchy_bound(q))]
    out = []
    while stack:
        lo, hi = stack.pop()
        n = count(lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo <= width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(out)


def _check_square(m: Matrix) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionError(f"expected a square matrix, got {n} rows of lengths {[len(r) for r in m]}")
    return n


def det_fraction_free(m: Matrix) -> Fraction:
    """Determinant by Bareiss elimination on an integer-scaled copy of ``m``."""
    n = _check_square(m)
    if n == 0:
        return Fraction(1)
    rows = []
    scale = Fraction(1)
    for row in m:
        fr = [Fraction(x) for x in row]
        d = lcm(*(x.denominator for x in fr))
        rows.append([int(x * d) for x in fr])
        scale *= d
    a = rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * a[n - 1][n - 1]) / scale


def det_cofactor(m: Matrix) -> Fraction:
    """Leibniz-formula determinant; test oracle only (n <= 7)."""
    n = _check_square(m)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i, p in enumerate(perm):
            prod *= m[i][p]
            if prod == 0:
                break
        total += -prod if inv % 2 else prod
    return total


def solve_exact(m: Matrix, rhs: Sequence[Scalar]) -> list[Fraction]:
    """Solve ``m x = rhs`` exactly by Gauss-Jordan elimination over Fractions.

    Raises :class:`SingularMatrixError` carrying the rank found.
    """
    n = _check_square(m)
    if len(rhs) != n:
        raise DimensionError(f"rhs has length {len(rhs)}, matrix is {n}x{n}")
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, rhs)]
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, n) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        a[rank] = [x / p for x in a[rank]]
        for r in range(n):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    if rank < n:
        raise SingularMatrixError(rank, n)
    x = [a[i][n] for i in range(n)]
    for row, b in zip(m, rhs):
        if sum(Fraction(c) * xi for c, xi in zip(row, x)) != b:
            raise ArithmeticError("exact back-substitution check failed")
    return x
