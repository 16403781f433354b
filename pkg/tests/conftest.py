import random
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from hessesphere.polyring import Poly

# fixed-seed property runs: derandomize makes every run draw the same examples
settings.register_profile("repro", derandomize=True, max_examples=120, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, nvars=3, max_terms=5, max_exp=3):
    terms = draw(st.lists(st.tuples(st.tuples(*[st.integers(0, max_exp)] * nvars), small_fractions),
                          max_size=max_terms))
    return Poly.from_terms(nvars, terms)


@st.composite
def unimodular(draw, n=3):
    """Random rational matrix of determinant +-1: product of elementary shears and a sign."""
    rng = random.Random(draw(st.integers(0, 10 ** 6)))
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(4):
        i, j = rng.sample(range(n), 2)
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        for k in range(n):
            M[i][k] += c * M[j][k]
    if rng.random() < 0.5:
        M[0], M[1] = M[1], M[0]
    return M


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
