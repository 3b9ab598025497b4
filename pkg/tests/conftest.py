import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from arboreal.graph import Multigraph

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

rationals = st.fractions(min_value=Fraction(1, 12), max_value=Fraction(20), max_denominator=12).filter(
    lambda x: x > 0
)


@st.composite
def multigraphs(draw, max_n=5, max_m=8, connected=False, loops=False, simple=False):
    n = draw(st.integers(2, max_n))
    edges = []
    if connected:
        # random spanning tree first
        for v in range(1, n):
            edges.append((draw(st.integers(0, v - 1)), v))
    extra = draw(st.integers(0, max(0, max_m - len(edges))))
    seen = {tuple(sorted(e)) for e in edges}
    for _ in range(extra):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        if u == v and not loops:
            continue
        key = tuple(sorted((u, v)))
        if simple and (key in seen or u == v):
            continue
        seen.add(key)
        edges.append((u, v))
    ws = [draw(rationals) for _ in edges]
    return Multigraph.from_edges(n, [(u, v, w) for (u, v), w in zip(edges, ws)])


def random_rational(rng: random.Random, lo=1, hi=12) -> Fraction:
    return Fraction(rng.randint(lo, hi * 3), rng.randint(1, 6))


def random_connected(rng: random.Random, n_max=7, m_max=12, simple=True) -> Multigraph:
    n = rng.randint(2, n_max)
    pairs = {(rng.randrange(v), v) for v in range(1, n)}
    edges = sorted(pairs)
    while len(edges) < m_max and rng.random() < 0.7:
        u, v = sorted(rng.sample(range(n), 2))
        if simple and (u, v) in pairs:
            continue
        pairs.add((u, v))
        edges.append((u, v))
    return Multigraph.from_edges(n, [(u, v, random_rational(rng)) for u, v in edges])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
