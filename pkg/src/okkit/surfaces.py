"""Intersection theory on S = E x E and its double cover Y.

Classes are integer triples ``(a, b, c)`` standing for ``a F1 + b F2 + c Diag``
with ``F1^2 = F2^2 = Diag^2 = 0`` and all mixed products equal to 1.  Y is
the double cover of S branched along a smooth member of ``|2R|``, ``R = F1 +
F2``; pullback doubles intersection numbers and ``K_Y = f^* R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import jetsep


@dataclass(frozen=True)
class SurfaceClass:
    a: int
    b: int
    c: int

    def __add__(self, other: "SurfaceClass") -> "SurfaceClass":
        return SurfaceClass(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "SurfaceClass") -> "SurfaceClass":
        return SurfaceClass(self.a - other.a, self.b - other.b, self.c - other.c)

    def __neg__(self) -> "SurfaceClass":
        return SurfaceClass(-self.a, -self.b, -self.c)

    def __rmul__(self, q: int) -> "SurfaceClass":
        return SurfaceClass(q * self.a, q * self.b, q * self.c)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class CoverClass:
    """The pullback f^*(base) on Y."""

    base: SurfaceClass


F1 = SurfaceClass(1, 0, 0)
F2 = SurfaceClass(0, 1, 0)
DIAG = SurfaceClass(0, 0, 1)
H = SurfaceClass(1, 1, 0)
R = SurfaceClass(1, 1, 0)


def intersect(c1: SurfaceClass, c2: SurfaceClass) -> int:
    return (c1.a * c2.b + c2.a * c1.b + c1.a * c2.c + c2.a * c1.c
            + c1.b * c2.c + c2.b * c1.c)


def a_ell(ell: int) -> SurfaceClass:
    if ell < 2:
        raise ValueError("ell must be at least 2")
    return SurfaceClass(ell, ell * ell - ell + 1, -(ell - 1))


def is_ample_abelian(C: SurfaceClass, polarization: SurfaceClass = H) -> bool:
    """Positive-cone test: C^2 > 0 and C . polarization > 0."""
    return intersect(C, C) > 0 and intersect(C, polarization) > 0


def pullback_intersect(c1: CoverClass, c2: CoverClass) -> int:
    return 2 * intersect(c1.base, c2.base)


def canonical_Y() -> CoverClass:
    # K_S = 0, so K_Y = f^*(K_S + R) = f^* R
    return CoverClass(R)


def n_ell(ell: int) -> int:
    return intersect(a_ell(ell), R)


def m_of_D(ell: int) -> int:
    """Least q >= 1 with q A_ell - R ample, found by upward search."""
    A = a_ell(ell)
    q = 1
    while not is_ample_abelian(q * A - R):
        q += 1
    return q


def threshold_real(ell: int, width=Fraction(1, 10**7)) -> tuple[Fraction, Fraction]:
    """Rational bracket [lo, hi] around (N + sqrt(N^2 - 4)) / 2, N = N_ell.

    Raises ArithmeticError unless the bracket lies strictly inside (N - 1, N).
    """
    N = n_ell(ell)
    disc = N * N - 4
    scale = 2 * width.denominator
    root = math.isqrt(disc * scale * scale)
    lo = Fraction(N * scale + root, 2 * scale)
    hi = Fraction(N * scale + root + 1, 2 * scale)
    if not (N - 1 < lo and hi < N):
        raise ArithmeticError(f"threshold bracket [{lo}, {hi}] escapes ({N - 1}, {N})")
    return lo, hi


@dataclass(frozen=True)
class SeshadriData:
    upper: int
    lower: int
    epsilon: int
    lower_citation: str = "ample integral line bundles on abelian varieties have Seshadri constant >= 1"


def seshadri_data(ell: int) -> SeshadriData:
    """Seshadri constant of A_ell at any point of S.

    The upper bound comes from the fibre F2 through the point; the lower bound
    is a cited fact, not recomputed.
    """
    upper = intersect(a_ell(ell), F2)
    lower = 1
    if upper < lower:
        raise ArithmeticError("Seshadri bounds are inconsistent")
    return SeshadriData(upper, lower, lower if upper == lower else None)


def final_coefficient(ell: int, s: int = 4) -> int:
    return s + m_of_D(ell)


def table_row(ell: int, s: int = 4) -> dict:
    A = a_ell(ell)
    return {
        "ell": ell,
        "a": A.a,
        "b": A.b,
        "c": A.c,
        "A2": intersect(A, A),
        "AH": intersect(A, H),
        "N": n_ell(ell),
        "m_D": m_of_D(ell),
        "coefficient": final_coefficient(ell, s),
    }


def surface_certificate(ell: int, s: int = 4, k: int = 1) -> dict:
    """Canonical-free certificate for ``(s + m(D_ell)) D_ell`` on the double cover.

    The body bound is not computed: epsilon(D_ell; y) >= epsilon(A_ell; x) = 1
    together with the surface inverted-simplex theorem puts the inverted
    simplex of size s inside every infinitesimal body of s D_ell.  Both steps
    are recorded as assumptions.
    """
    n = 2
    sd = seshadri_data(ell)
    body = jetsep.inverted_simplex(s * sd.lower, n)
    meta = {
        "exact": False,
        "kmax": None,
        "source": "seshadri lower bound: inverted simplex of size s * epsilon(D; y)",
        "flags": "uniform by assumption",
    }
    A = a_ell(ell)
    evidence = {
        "ell": ell,
        "class": list((m_of_D(ell) * A - R).as_tuple()),
        "self_intersection": intersect(m_of_D(ell) * A - R, m_of_D(ell) * A - R),
        "degree_on_A": intersect(m_of_D(ell) * A - R, A),
        "criterion": "positive cone component of an abelian surface",
    }
    return jetsep.certify_canonical_free(
        {"y": [(body, meta)]},
        m=s,
        m_D=m_of_D(ell),
        n=n,
        k=k,
        m_D_evidence=evidence,
        divisor=f"D_{ell}",
        assumptions=[
            sd.lower_citation,
            "epsilon(D_ell; y) >= epsilon(A_ell; f(y)) for the finite map f",
            "epsilon(D; y) >= 1 puts the inverted simplex of size s in every infinitesimal body of s D on a surface",
            "the point y is arbitrary, so the bound is uniform over Y",
        ],
    )
