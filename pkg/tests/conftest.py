from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from okkit import ratgeom as rg

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def small_points(dim, min_size=1, max_size=8, lo=-4, hi=4):
    coord = st.integers(lo, hi)
    return st.lists(st.tuples(*[coord] * dim), min_size=min_size, max_size=max_size)


@st.composite
def full_polytopes(draw, dim=2, max_size=8):
    pts = draw(small_points(dim, dim + 1, max_size))
    P = rg.hull(pts, dim=dim)
    if not P.is_full_dimensional:
        # thicken with a unit simplex at the first point
        base = pts[0]
        extra = [tuple(base[j] + (1 if j == i else 0) for j in range(dim)) for i in range(dim)]
        P = rg.hull(pts + extra, dim=dim)
    return P


@pytest.fixture
def unit_square():
    return rg.box([0, 0], [1, 1])


def F(*args):
    return Fraction(*args)


@st.composite
def smooth_polygons(draw, max_side=3):
    """Smooth lattice polygons with the positive orthant as tangent cone at the origin."""
    kind = draw(st.sampled_from(["simplex", "box", "hirzebruch"]))
    a = draw(st.integers(1, max_side))
    if kind == "simplex":
        pts = [(0, 0), (a, 0), (0, a)]
    else:
        b = draw(st.integers(1, max_side))
        r = 0 if kind == "box" else draw(st.integers(1, 2))
        pts = [(0, 0), (a + r * b, 0), (a, b), (0, b)]
    return rg.hull(pts)


@st.composite
def origin_polytopes(draw, dim=2, max_size=7):
    """Full-dimensional polytopes containing the origin (possibly on the boundary)."""
    pts = draw(small_points(dim, dim, max_size, -3, 6))
    extra = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    return rg.hull(pts + [(0,) * dim] + extra, dim=dim)


def xi_oracle(P, rel=Fraction(1, 10**12)):
    """Binary search for the largest inverted simplex inside P, using contains only."""
    from okkit.jetsep import inverted_simplex

    n = P.dim
    if not rg.contains(P, inverted_simplex(Fraction(1, 10**15), n)):
        return Fraction(0)
    lo, hi = Fraction(0), Fraction(1)
    while rg.contains(P, inverted_simplex(hi, n)):
        lo, hi = hi, hi * 2
        if hi > 2**40:
            return float("inf")
    while hi - lo > rel * hi:
        mid = (lo + hi) / 2
        if rg.contains(P, inverted_simplex(mid, n)):
            lo = mid
        else:
            hi = mid
    return lo
