"""Newton-Okounkov bodies of toric divisors at torus-fixed points.

A toric divisor is given by its lattice polytope ``P``; sections of ``kD`` are
the lattice points of ``kP``.  At a smooth vertex ``v`` the primitive edge
vectors form a lattice basis ``E`` and a section ``u`` has local exponent
vector ``w = E^{-1} (u - k v) >= 0``.  The torus-invariant admissible flag
reads ``w`` directly; the infinitesimal flag reads ``(|w|, w_2, ..., w_n)``.

Bodies come in two flavours:

* enumerated: hull of normalised valuation vectors over levels ``k <= kmax``
  (always an inner bound of the true body);
* exact: the closed form.  Valuations are affine in ``x = u/k``, so the
  closure of the normalised value set is the convex hull of the image of the
  relevant region of ``P``.  For multipoint bodies that region is cut out by
  strict lexicographic inequalities and is handled piece by piece.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Sequence

import numpy as np

from . import ratgeom as rg
from .ratgeom import Polytope, Vector
from .valuation import MonomialSection, infinitesimal_valuation, jet_matrix

DEFAULT_CAP = 200_000
KINDS = ("flag", "infinitesimal")


class CapExceeded(RuntimeError):
    pass


class NonSmoothVertex(ValueError):
    pass


def lattice_cap() -> int:
    return int(os.environ.get("OKKIT_CAP", DEFAULT_CAP))


def _matmul(m: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, x)) for row in m)


@dataclass(frozen=True)
class ToricDivisorData:
    polytope: Polytope

    def __post_init__(self):
        P = self.polytope
        if not P.is_full_dimensional:
            raise ValueError("the polytope of a big toric divisor must be full-dimensional")
        if any(c.denominator != 1 for v in P.vertices for c in v):
            raise ValueError("toric divisor polytopes must have integer vertices")

    @classmethod
    def from_vertices(cls, vertices: Iterable[Sequence]) -> "ToricDivisorData":
        return cls(rg.hull(vertices))

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def __add__(self, other: "ToricDivisorData") -> "ToricDivisorData":
        return ToricDivisorData(rg.minkowski_sum(self.polytope, other.polytope))

    def scaled(self, s: int) -> "ToricDivisorData":
        return ToricDivisorData(rg.scale(self.polytope, s))

    def vertex_index(self, vertex: Sequence) -> int:
        v = rg.vec(vertex)
        try:
            return self.polytope.vertices.index(v)
        except ValueError:
            raise ValueError(f"{tuple(vertex)} is not a vertex of the polytope") from None


@dataclass(frozen=True)
class EvaluationPoint:
    """A torus-fixed point (vertex of P) with an ordering of its local axes."""

    vertex: tuple[int, ...]
    frame: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertex", tuple(int(c) for c in self.vertex))
        if self.frame is None:
            object.__setattr__(self, "frame", tuple(range(len(self.vertex))))
        else:
            object.__setattr__(self, "frame", tuple(int(c) for c in self.frame))
        if sorted(self.frame) != list(range(len(self.vertex))):
            raise ValueError(f"frame {self.frame} is not a permutation of the axes")

    def with_frame(self, frame: Sequence[int]) -> "EvaluationPoint":
        return EvaluationPoint(self.vertex, tuple(frame))

    def to_json(self) -> dict:
        return {"vertex": list(self.vertex), "frame": list(self.frame)}


def all_frames(n: int) -> list[tuple[int, ...]]:
    return list(permutations(range(n)))


# ---------------------------------------------------------------------------
# local geometry at a vertex
# ---------------------------------------------------------------------------


def edge_generators(T: ToricDivisorData, vertex: Sequence) -> list[tuple[int, ...]]:
    """Primitive edge directions at a vertex, in descending lex order."""
    P = T.polytope
    i = T.vertex_index(vertex)
    gens = []
    for j in P.neighbors(i):
        d = [b - a for a, b in zip(P.vertices[i], P.vertices[j])]
        gens.append(rg.primitive(d)[0])
    return sorted(gens, reverse=True)


def local_frame(T: ToricDivisorData, p: EvaluationPoint) -> list[list[int]]:
    """Integer matrix sending ``u - vertex`` to local exponents (frame order applied).

    Raises NonSmoothVertex unless the tangent cone is unimodular.
    """
    n = T.dim
    gens = edge_generators(T, p.vertex)
    if len(gens) != n or abs(rg.det([list(g) for g in gens])) != 1:
        raise NonSmoothVertex(f"vertex {p.vertex} is not a smooth fixed point")
    ordered = [gens[f] for f in p.frame]
    columns = [[ordered[j][i] for j in range(n)] for i in range(n)]
    inv = rg.inverse(columns)
    return [[int(x) for x in row] for row in inv]


def valuation_matrix(T: ToricDivisorData, p: EvaluationPoint, kind: str) -> list[list[int]]:
    """Linear part ``L`` of the valuation ``u -> L (u - k vertex)``."""
    M = local_frame(T, p)
    if kind == "flag":
        return M
    if kind == "infinitesimal":
        J = jet_matrix(T.dim)
        return [[sum(J[i][l] * M[l][j] for l in range(T.dim)) for j in range(T.dim)] for i in range(T.dim)]
    raise ValueError(f"unknown valuation kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------


def _lattice_points(facets, equations, lo, hi, cap: int) -> np.ndarray:
    lo = [int(np.floor(float(x))) - 1 for x in lo]
    hi = [int(np.ceil(float(x))) + 1 for x in hi]
    sizes = [b - a + 1 for a, b in zip(lo, hi)]
    if int(np.prod(sizes, dtype=object)) > 64 * cap:
        raise CapExceeded(f"bounding box of {sizes} points exceeds the lattice cap {cap}")
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    keep = np.ones(len(grid), dtype=bool)
    for a, b in facets:
        b = Fraction(b)
        # <a,u> <= b  <=>  den*<a,u> <= num for integer u
        keep &= grid @ np.array(a, dtype=np.int64) * b.denominator <= b.numerator
    for a, b in equations:
        b = Fraction(b)
        keep &= grid @ np.array(a, dtype=np.int64) * b.denominator == b.numerator
    pts = grid[keep]
    if len(pts) > cap:
        raise CapExceeded(f"{len(pts)} lattice points exceed the cap {cap}")
    return pts


def sections(T: ToricDivisorData, k: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """Lattice points of ``kP`` (a monomial basis of H^0(kD)), sorted."""
    if k < 1:
        raise ValueError("level k must be positive")
    cap = lattice_cap() if cap is None else cap
    P = T.polytope
    lo, hi = rg.bounding_box(P)
    facets = [(a, k * b) for a, b in P.facets]
    pts = _lattice_points(facets, (), [k * x for x in lo], [k * x for x in hi], cap)
    return sorted(tuple(int(c) for c in u) for u in pts)


def local_exponents(T: ToricDivisorData, p: EvaluationPoint, k: int, cap: int | None = None) -> set[tuple[int, ...]]:
    M = local_frame(T, p)
    kv = [k * c for c in p.vertex]
    return {_matmul(M, [a - b for a, b in zip(u, kv)]) for u in sections(T, k, cap)}


def _values(T, p, kind, k, cap=None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    L = valuation_matrix(T, p, kind)
    kv = [k * c for c in p.vertex]
    return [(u, _matmul(L, [a - b for a, b in zip(u, kv)])) for u in sections(T, k, cap)]


@dataclass(frozen=True)
class SemigroupSample:
    level: int
    points: frozenset[tuple[int, ...]]

    def normalized(self) -> set[Vector]:
        return {tuple(Fraction(c, self.level) for c in pt) for pt in self.points}


def semigroup_samples(T: ToricDivisorData, p: EvaluationPoint, kmax: int, kind: str = "infinitesimal",
                      cap: int | None = None) -> list[SemigroupSample]:
    return [SemigroupSample(k, frozenset(v for _, v in _values(T, p, kind, k, cap))) for k in range(1, kmax + 1)]


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NOBody:
    """A computed Newton-Okounkov body with its provenance.

    ``exact`` is True when ``polytope`` is the body itself; otherwise it is an
    inner bound obtained from levels ``k <= kmax``.  ``inner`` holds the
    enumerated hull whenever enumeration was run.
    """

    polytope: Polytope
    kind: str
    exact: bool
    kmax: int | None
    points: tuple[EvaluationPoint, ...]
    index: int = 0
    inner: Polytope | None = None
    level1: Polytope | None = None
    shift: Fraction = Fraction(0)

    @property
    def point(self) -> EvaluationPoint:
        return self.points[self.index]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "exact": self.exact,
            "kmax": self.kmax,
            "point": self.point.to_json(),
            "flags": [q.to_json() for q in self.points],
            "index": self.index,
            "polytope": self.polytope.to_json(),
        }
        if self.shift:
            out["shift"] = str(self.shift)
        if self.inner is not None:
            out["inner"] = self.inner.to_json()
        if self.level1 is not None:
            out["level1"] = self.level1.to_json()
        return out


def _image(L, v, pts, shift=Fraction(0)) -> list[Vector]:
    out = []
    for x in pts:
        y = list(_matmul(L, [a - b for a, b in zip(x, v)]))
        y[0] -= shift
        out.append(tuple(y))
    return out


def exact_body(T: ToricDivisorData, p: EvaluationPoint, kind: str = "infinitesimal") -> Polytope:
    """Closed form of the single-point body: the affine image of P."""
    L = valuation_matrix(T, p, kind)
    return rg.hull(_image(L, p.vertex, T.polytope.vertices), dim=T.dim)


def okounkov_body_invariant_flag(T: ToricDivisorData, p: EvaluationPoint) -> NOBody:
    return NOBody(exact_body(T, p, "flag"), "flag", True, None, (p,))


def single_point_body(T: ToricDivisorData, p: EvaluationPoint, kmax: int, kind: str = "infinitesimal",
                      cap: int | None = None) -> NOBody:
    """Enumerated body over levels ``k <= kmax``.

    Marked exact only when the enumerated hull reaches the closed form, which
    always contains it.
    """
    if kmax < 1:
        raise ValueError("kmax must be positive")
    pts: set[Vector] = set()
    level1 = None
    for sample in semigroup_samples(T, p, kmax, kind, cap):
        pts |= sample.normalized()
        if sample.level == 1:
            level1 = rg.hull(pts, dim=T.dim)
    inner = rg.hull(pts, dim=T.dim)
    closed = exact_body(T, p, kind)
    if not rg.contains(closed, inner):
        raise ArithmeticError("enumerated body escapes the closed-form body")
    return NOBody(inner, kind, inner == closed, kmax, (p,), 0, inner, level1)


def infinitesimal_body_fixed_point(T: ToricDivisorData, p: EvaluationPoint, kmax: int,
                                   cap: int | None = None) -> NOBody:
    return single_point_body(T, p, kmax, "infinitesimal", cap)


def _first_coordinate(L, v):
    """First valuation coordinate as an affine function (coeffs, constant)."""
    row = L[0]
    return tuple(row), -sum(a * b for a, b in zip(row, v))


def _shrunk(T: ToricDivisorData, maps, t: Fraction) -> Polytope:
    """P ∩ {first valuation coordinate >= t at every marked point}."""
    P = T.polytope
    if t == 0:
        return P
    hs = []
    for L, v in maps:
        c, e = _first_coordinate(L, v)
        hs.append(([-x for x in c], e - t))
    return rg.intersect_halfspaces(P, hs)


def _winning_region_vertices(T, maps, j, base: Polytope) -> list[Vector]:
    """Vertices of the closures of the pieces of {x : nu_j(x) <lex nu_i(x) for all i != j}."""
    n = T.dim
    Lj, vj = maps[j]
    others = [i for i in range(len(maps)) if i != j]
    # delta_i(x) = nu_i(x) - nu_j(x), one affine function per coordinate
    deltas = {}
    for i in others:
        Li, vi = maps[i]
        rows = []
        for l in range(n):
            coef = tuple(Li[l][c] - Lj[l][c] for c in range(n))
            const = -sum(Li[l][c] * vi[c] for c in range(n)) + sum(Lj[l][c] * vj[c] for c in range(n))
            rows.append((coef, const))
        deltas[i] = rows
    out: list[Vector] = []
    for choice in product(range(n), repeat=len(others)):
        hs = []
        strict = []
        for i, l in zip(others, choice):
            for m in range(l):
                coef, const = deltas[i][m]
                hs.append((coef, -const))
                hs.append(([-x for x in coef], const))
            coef, const = deltas[i][l]
            hs.append(([-x for x in coef], const))
            strict.append((coef, const))
        Q = rg.intersect_halfspaces(base, hs)
        if Q.is_empty:
            continue
        if all(any(rg.dot(coef, x) + const > 0 for x in Q.vertices) for coef, const in strict):
            out.extend(Q.vertices)
    return out


def multipoint_bodies(T: ToricDivisorData, points: Sequence[EvaluationPoint], kmax: int,
                      kind: str = "infinitesimal", shift=0, cap: int | None = None) -> list[NOBody]:
    """Multipoint bodies of ``D - shift * (sum of first flag divisors)``.

    A section of level k counts for point j iff its valuation there is
    strictly lex-smaller than at every other point; ties count for nobody.
    Each returned body is the exact closure, with the enumerated hull over
    levels ``k <= kmax`` (levels where ``k * shift`` is integral) in ``inner``.
    """
    if kmax < 1:
        raise ValueError("kmax must be positive")
    points = tuple(points)
    if len({q.vertex for q in points}) != len(points):
        raise ValueError("multipoint bodies need distinct points")
    t = Fraction(shift)
    if t < 0:
        raise ValueError("shift must be nonnegative")
    n = T.dim
    maps = [(valuation_matrix(T, q, kind), q.vertex) for q in points]
    N = len(points)

    enumerated: list[set[Vector]] = [set() for _ in range(N)]
    for k in range(1, kmax + 1):
        kt = k * t
        if kt.denominator != 1:
            continue
        kt = int(kt)
        for u in sections(T, k, cap):
            vals = [_matmul(L, [a - k * b for a, b in zip(u, v)]) for L, v in maps]
            if any(val[0] < kt for val in vals):
                continue
            for j in range(N):
                if all(vals[j] < vals[i] for i in range(N) if i != j):
                    y = list(vals[j])
                    y[0] -= kt
                    enumerated[j].add(tuple(Fraction(c, k) for c in y))

    base = _shrunk(T, maps, t)
    out = []
    for j in range(N):
        Lj, vj = maps[j]
        region = _winning_region_vertices(T, maps, j, base) if not base.is_empty else []
        exact = rg.hull(_image(Lj, vj, region, t), dim=n)
        inner = rg.hull(enumerated[j], dim=n)
        if not rg.contains(exact, inner):
            raise ArithmeticError("enumerated multipoint body escapes its closure")
        out.append(NOBody(exact, kind, True, kmax, points, j, inner, shift=t))
    return out


# ---------------------------------------------------------------------------
# mu(L; D)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivisorFamily:
    """The divisor D = sum of the first flag divisors at the given points."""

    points: tuple[EvaluationPoint, ...]
    kind: str = "infinitesimal"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))


def compute_mu(T: ToricDivisorData, F: DivisorFamily) -> Fraction:
    """sup{t >= 0 : P ∩ {first coordinate >= t at every point} is full-dimensional}."""
    if not F.points:
        raise ValueError("empty divisor family: mu is unbounded")
    maps = [(valuation_matrix(T, q, F.kind), q.vertex) for q in F.points]
    firsts = [_first_coordinate(L, v) for L, v in maps]
    if len(set(firsts)) != len(firsts):
        raise ValueError("divisor family components are not distinct")
    P = T.polytope
    top = max(rg.dot(c, x) + e for c, e in firsts for x in P.vertices)
    if top <= 0:
        return Fraction(0)
    lifted = [tuple(x) + (Fraction(0),) for x in P.vertices] + [tuple(x) + (Fraction(top),) for x in P.vertices]
    prism = rg.hull(lifted, dim=T.dim + 1)
    # t - phi(x) <= 0
    hs = [(tuple(-a for a in c) + (1,), e) for c, e in firsts]
    Q = rg.intersect_halfspaces(prism, hs)
    return max(x[-1] for x in Q.vertices)


# ---------------------------------------------------------------------------
# jet oracles
# ---------------------------------------------------------------------------


def _shell(n: int, k: int) -> Iterable[tuple[int, ...]]:
    return (a for a in product(range(k + 1), repeat=n) if sum(a) <= k)


def jet_oracle_fixed_point(T: ToricDivisorData, p: EvaluationPoint, k: int, cap: int | None = None) -> bool:
    """Does D separate k-jets at the fixed point?

    Monomials give a diagonal jet matrix, so this is coverage of
    ``{a : |a| <= k}`` by the level-1 local exponents.
    """
    if k < 0:
        return True
    exps = local_exponents(T, p, 1, cap)
    return all(a in exps for a in _shell(T.dim, k))


def max_jet_order(T: ToricDivisorData, p: EvaluationPoint, cap: int | None = None) -> int:
    """Largest k with k-jet separation at p (-1 if not even globally generated there)."""
    exps = local_exponents(T, p, 1, cap)
    k = -1
    while all(a in exps for a in _shell(T.dim, k + 1)):
        k += 1
    return k


def adjoint_max_jet_order(T: ToricDivisorData, p: EvaluationPoint, cap: int | None = None) -> int:
    """Largest k such that K_X + D separates k-jets at p (-1 if none).

    For a smooth toric variety K_X + D has section polytope
    ``{<a_F, u> <= b_F - 1}``; in the chart at p the local exponents are
    ``E^{-1}(u - v) - (1, ..., 1)``.
    """
    P = T.polytope
    M = local_frame(T, p)
    lo, hi = rg.bounding_box(P)
    facets = [(a, b - 1) for a, b in P.facets]
    pts = _lattice_points(facets, (), lo, hi, lattice_cap() if cap is None else cap)
    exps = set()
    for u in pts:
        w = _matmul(M, [int(a) - b for a, b in zip(u, p.vertex)])
        exps.add(tuple(c - 1 for c in w))
    k = -1
    while all(a in exps for a in _shell(T.dim, k + 1)):
        k += 1
    return k


def random_section_oracle(T: ToricDivisorData, p: EvaluationPoint, kmax: int, samples: int = 20,
                          seed: int = 0, order: str = "lex", cap: int | None = None) -> list[dict]:
    """Sample random sections (sums of monomials) and report valuation vectors
    that fall outside the monomial hull.  Returns the list of discrepancies."""
    rng = random.Random(seed)
    body = exact_body(T, p, "infinitesimal")
    M = local_frame(T, p)
    found = []
    for k in range(1, kmax + 1):
        kv = [k * c for c in p.vertex]
        exps = sorted(_matmul(M, [a - b for a, b in zip(u, kv)]) for u in sections(T, k, cap))
        for _ in range(samples):
            size = rng.randint(1, min(len(exps), 6))
            s = MonomialSection.of(rng.sample(exps, size))
            val = infinitesimal_valuation(s, order)
            x = tuple(Fraction(c, k) for c in val)
            if not body.contains_point(x):
                found.append({"level": k, "terms": [list(t) for t in s.terms], "value": [str(c) for c in x]})
    return found
