"""Exact rational convex polytopes.

Every polytope carries both a vertex list and a half-space description.  The
half-space description is computed from the vertices with an exact double
description pass on the homogenised point cone, so there is no floating point
anywhere in this module.  Lower-dimensional and empty polytopes are ordinary
values: their affine hull is stored as a list of equations next to the
relative facets.

Conventions
-----------
* A facet ``(a, b)`` means ``<a, x> <= b`` with ``a`` a primitive integer
  vector lying in the direction space of the affine hull.
* An equation ``(a, b)`` means ``<a, x> == b``; the equation block is in
  reduced row echelon form scaled to primitive integers.
* Vertices are sorted lexicographically, so two polytopes describing the same
  set compare equal field by field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]
Facet = tuple[tuple[int, ...], Fraction]


class DimensionMismatch(ValueError):
    pass


def vec(coords: Iterable) -> Vector:
    """Coerce numbers or ``"p/q"`` strings to an exact rational vector."""
    return tuple(Fraction(c) for c in coords)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def primitive(v: Sequence[Fraction]) -> tuple[tuple[int, ...], Fraction]:
    """Scale ``v`` by a positive factor to a primitive integer vector.

    Returns the integer vector and the scale factor used.
    """
    den = reduce(_lcm, (Fraction(x).denominator for x in v), 1)
    ints = [int(Fraction(x) * den) for x in v]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        return tuple(ints), Fraction(1)
    return tuple(i // g for i in ints), Fraction(den, g)


# ---------------------------------------------------------------------------
# small exact linear algebra
# ---------------------------------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns nonzero rows and pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}."""
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve a square nonsingular system exactly."""
    n = len(matrix)
    aug = [list(matrix[i]) + [rhs[i]] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [red[i][n] for i in range(n)]


def det(matrix: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in matrix]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        out *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * out


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [list(matrix[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------


def _int_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    return primitive(row)[0]


def _facets_full_dim(points: list[Vector]) -> list[tuple[tuple[int, ...], int]]:
    """Facets of conv(points) for points affinely spanning Q^r.

    Extreme rays ``y = (a, b)`` of the cone ``{y : <p, a> - b <= 0 for all p}``
    are exactly the facet inequalities ``<a, x> <= b``.  Rays are built by
    the double description method with the combinatorial adjacency test.
    """
    r = len(points[0])
    d = r + 1
    rows = [_int_row(list(p) + [Fraction(-1)]) for p in points]

    # initial simplex of r+1 affinely independent points
    chosen: list[int] = []
    for i, row in enumerate(rows):
        if rank([rows[j] for j in chosen] + [row]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d:
                break
    inv = inverse([rows[i] for i in chosen])
    rays: list[tuple[tuple[int, ...], int]] = []
    for j in range(d):
        col = [-inv[i][j] for i in range(d)]
        mask = 0
        for i_pos, i in enumerate(chosen):
            if i_pos != j:
                mask |= 1 << i
        rays.append((_int_row(col), mask))

    chosen_set = set(chosen)
    for t, h in enumerate(rows):
        if t in chosen_set:
            continue
        vals = [sum(x * y for x, y in zip(h, ray)) for ray, _ in rays]
        plus = [i for i, v in enumerate(vals) if v > 0]
        bit = 1 << t
        if not plus:
            rays = [(ray, m | bit) if vals[i] == 0 else (ray, m) for i, (ray, m) in enumerate(rays)]
            continue
        minus = [i for i, v in enumerate(vals) if v < 0]
        new: list[tuple[tuple[int, ...], int]] = []
        for i, (ray, m) in enumerate(rays):
            if vals[i] < 0:
                new.append((ray, m))
            elif vals[i] == 0:
                new.append((ray, m | bit))
        masks = [m for _, m in rays]
        for p in plus:
            for q in minus:
                common = masks[p] & masks[q]
                if common.bit_count() < d - 2:
                    continue
                adjacent = True
                for o, mo in enumerate(masks):
                    if o != p and o != q and common & ~mo == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                comb = [vp * x - vq * y for x, y in zip(rays[q][0], rays[p][0])]
                g = reduce(math.gcd, comb, 0)
                new.append((tuple(c // g for c in comb), common | bit))
        rays = new
    return [(ray[:r], ray[r]) for ray, _ in rays]


# ---------------------------------------------------------------------------
# Polytope
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """Closed convex polytope in Q^dim with matching V- and H-descriptions.

    Build instances with :func:`hull` (or :func:`empty`); the constructor does
    no normalisation of its own.
    """

    dim: int
    vertices: tuple[Vector, ...]
    facets: tuple[Facet, ...]
    equations: tuple[Facet, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def affine_dim(self) -> int:
        if self.is_empty:
            return -1
        return self.dim - len(self.equations)

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    def contains_point(self, x: Sequence) -> bool:
        if self.is_empty:
            return False
        if len(x) != self.dim:
            raise DimensionMismatch(f"point of dimension {len(x)} vs polytope of dimension {self.dim}")
        return all(dot(a, x) == b for a, b in self.equations) and all(
            dot(a, x) <= b for a, b in self.facets
        )

    def tight_facets(self, x: Sequence) -> frozenset[int]:
        return frozenset(i for i, (a, b) in enumerate(self.facets) if dot(a, x) == b)

    @cached_property
    def _vertex_incidence(self) -> tuple[frozenset[int], ...]:
        return tuple(self.tight_facets(v) for v in self.vertices)

    def facet_vertices(self, index: int) -> tuple[Vector, ...]:
        return tuple(v for v, inc in zip(self.vertices, self._vertex_incidence) if index in inc)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Index pairs of vertices joined by an edge.

        ``u, v`` span an edge iff the smallest face containing both (the
        intersection of all facets through both) has no other vertex.
        """
        inc = self._vertex_incidence
        out = []
        for i, j in combinations(range(len(self.vertices)), 2):
            common = inc[i] & inc[j]
            if all(not common <= inc[o] for o in range(len(self.vertices)) if o != i and o != j):
                out.append((i, j))
        return tuple(out)

    def neighbors(self, index: int) -> list[int]:
        return sorted({j if i == index else i for i, j in self.edges if index in (i, j)})

    def __repr__(self) -> str:
        verts = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope(dim={self.dim}, vertices=[{verts}])"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [[str(c) for c in v] for v in self.vertices],
            "facets": [{"normal": list(a), "offset": str(b)} for a, b in self.facets],
            "equations": [{"normal": list(a), "offset": str(b)} for a, b in self.equations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        return hull([vec(v) for v in data["vertices"]], dim=int(data["dim"]))


def empty(dim: int) -> Polytope:
    return Polytope(dim, (), (), ())


def _check_dims(points: Sequence[Vector], dim: int | None) -> int:
    dims = {len(p) for p in points}
    if dim is not None:
        dims.add(dim)
    if len(dims) > 1:
        raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
    if not dims:
        raise ValueError("cannot infer the dimension of an empty point set")
    return dims.pop()


def _canonical_equations(rows: list[list[Fraction]]) -> tuple[Facet, ...]:
    red, _ = rref(rows)
    out = []
    for row in red:
        ints, scale = primitive(row[:-1])
        out.append((ints, row[-1] * scale))
    return tuple(out)


def hull(points: Iterable[Sequence], dim: int | None = None) -> Polytope:
    """Convex hull of a finite point set with irredundant V- and H-rep."""
    pts = sorted({vec(p) for p in points})
    n = _check_dims(pts, dim)
    if not pts:
        return empty(n)
    p0 = pts[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in pts[1:]]
    basis: list[list[Fraction]] = []
    for dvec in diffs:
        if rank(basis + [dvec]) > len(basis):
            basis.append(dvec)
            if len(basis) == n:
                break
    r = len(basis)

    eq_rows = [row + [dot(row, p0)] for row in nullspace(basis, n)] if r < n else []
    equations = _canonical_equations(eq_rows) if eq_rows else ()

    if r == 0:
        return Polytope(n, (p0,), (), equations)

    # coordinates of every point in the basis, read off r independent coordinates
    cols: list[int] = []
    for i in range(n):
        trial = cols + [i]
        if rank([[basis[j][c] for c in trial] for j in range(r)]) == len(trial):
            cols = trial
            if len(cols) == r:
                break
    sub = [[basis[j][c] for j in range(r)] for c in cols]  # r x r, sub @ lam = diff[cols]
    sub_inv = inverse(sub)
    lam_pts = []
    for p in pts:
        rhs = [p[c] - p0[c] for c in cols]
        lam_pts.append(tuple(dot(row, rhs) for row in sub_inv))

    raw = _facets_full_dim(lam_pts)

    # map relative facets back: a = B (B^T B)^{-1} c lies in the direction space
    gram = [[dot(bi, bj) for bj in basis] for bi in basis]
    gram_inv = inverse(gram)
    facets = set()
    for c, dval in raw:
        y = [dot(row, c) for row in gram_inv]
        a = [sum(y[j] * basis[j][i] for j in range(r)) for i in range(n)]
        ints, scale = primitive(a)
        offset = (Fraction(dval) + dot(a, p0)) * scale
        facets.add((ints, offset))
    facets_t = tuple(sorted(facets))

    verts = []
    for p in pts:
        tight = [a for a, b in facets_t if dot(a, p) == b]
        if rank(tight) == r:
            verts.append(p)
    poly = Polytope(n, tuple(verts), facets_t, equations)
    _cross_check(poly, pts)
    return poly


def _cross_check(poly: Polytope, pts: Sequence[Vector]) -> None:
    for p in pts:
        if not poly.contains_point(p):
            raise ArithmeticError(f"H-description of {poly!r} excludes input point {p}")
    for i in range(len(poly.facets)):
        if not poly.facet_vertices(i):
            raise ArithmeticError(f"facet {poly.facets[i]} of {poly!r} has no vertex")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _same_dim(P: Polytope, Q: Polytope) -> None:
    if P.dim != Q.dim:
        raise DimensionMismatch(f"dimensions {P.dim} and {Q.dim} differ")


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    _same_dim(P, Q)
    return hull(
        (tuple(x + y for x, y in zip(p, q)) for p in P.vertices for q in Q.vertices), dim=P.dim
    )


def contains(P: Polytope, Q: Polytope) -> bool:
    """Exact test of Q ⊆ P (boundary counts as inside)."""
    _same_dim(P, Q)
    return all(P.contains_point(v) for v in Q.vertices)


def translate(P: Polytope, v: Sequence) -> Polytope:
    v = vec(v)
    if len(v) != P.dim:
        raise DimensionMismatch(f"shift of dimension {len(v)} vs polytope of dimension {P.dim}")
    verts = tuple(sorted(tuple(x + y for x, y in zip(p, v)) for p in P.vertices))
    facets = tuple(sorted((a, b + dot(a, v)) for a, b in P.facets))
    eqs = tuple((a, b + dot(a, v)) for a, b in P.equations)
    return Polytope(P.dim, verts, facets, eqs)


def scale(P: Polytope, s) -> Polytope:
    s = Fraction(s)
    return hull((tuple(s * x for x in p) for p in P.vertices), dim=P.dim)


def linear_image(P: Polytope, matrix: Sequence[Sequence]) -> Polytope:
    """Image of P under x -> matrix @ x (matrix is m x dim)."""
    m = len(matrix)
    return hull((tuple(dot(row, p) for row in matrix) for p in P.vertices), dim=m)


def cut(P: Polytope, a: Sequence, b) -> Polytope:
    """P ∩ {<a, x> <= b}, computed from the vertices and the crossing edges."""
    a = vec(a)
    b = Fraction(b)
    if len(a) != P.dim:
        raise DimensionMismatch("half-space and polytope dimensions differ")
    vals = [dot(a, v) for v in P.vertices]
    if all(x <= b for x in vals):
        return P
    keep = [v for v, x in zip(P.vertices, vals) if x <= b]
    for i, j in P.edges:
        xi, xj = vals[i], vals[j]
        if (xi - b) * (xj - b) < 0:
            lam = (b - xi) / (xj - xi)
            vi, vj = P.vertices[i], P.vertices[j]
            keep.append(tuple(p + lam * (q - p) for p, q in zip(vi, vj)))
    return hull(keep, dim=P.dim)


def intersect_halfspaces(P: Polytope, halfspaces: Iterable[tuple[Sequence, object]]) -> Polytope:
    for a, b in halfspaces:
        P = cut(P, a, b)
        if P.is_empty:
            break
    return P


def slice_ge(P: Polytope, t) -> Polytope:
    """P ∩ {x_1 >= t}."""
    a = [Fraction(0)] * P.dim
    a[0] = Fraction(-1)
    return cut(P, a, -Fraction(t))


def intersection(P: Polytope, Q: Polytope) -> Polytope:
    _same_dim(P, Q)
    hs = list(Q.facets)
    for a, b in Q.equations:
        hs.append((a, b))
        hs.append((tuple(-x for x in a), -b))
    return intersect_halfspaces(P, hs)


def _simplices(P: Polytope) -> list[tuple[Vector, ...]]:
    """Pulling triangulation of P into affine_dim-simplices."""
    r = P.affine_dim
    if r <= 0:
        return [P.vertices] if r == 0 else []
    if len(P.vertices) == r + 1:
        return [P.vertices]
    apex = P.vertices[0]
    apex_inc = P.tight_facets(apex)
    out = []
    for i in range(len(P.facets)):
        if i in apex_inc:
            continue
        face = hull(P.facet_vertices(i), dim=P.dim)
        for simplex in _simplices(face):
            out.append((apex,) + simplex)
    return out


def volume(P: Polytope) -> Fraction:
    """Euclidean volume in Q^dim; zero for lower-dimensional bodies."""
    if not P.is_full_dimensional:
        return Fraction(0)
    n = P.dim
    total = Fraction(0)
    for simplex in _simplices(P):
        base = simplex[0]
        total += abs(det([[x - y for x, y in zip(v, base)] for v in simplex[1:]]))
    return total / math.factorial(n)


def bounding_box(P: Polytope) -> tuple[Vector, Vector]:
    lo = tuple(min(v[i] for v in P.vertices) for i in range(P.dim))
    hi = tuple(max(v[i] for v in P.vertices) for i in range(P.dim))
    return lo, hi


def box(lo: Sequence, hi: Sequence) -> Polytope:
    """Axis-parallel box [lo_1, hi_1] x ... x [lo_n, hi_n]."""
    lo, hi = vec(lo), vec(hi)
    corners = [[]]
    for a, b in zip(lo, hi):
        corners = [c + [x] for c in corners for x in (a, b)]
    return hull(corners, dim=len(lo))


def standard_simplex(size, n: int) -> Polytope:
    size = Fraction(size)
    pts = [[Fraction(0)] * n]
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = size
        pts.append(e)
    return hull(pts, dim=n)


def from_halfspaces(halfspaces: Sequence[tuple[Sequence, object]], bound) -> Polytope:
    """Bounded polytope from inequalities, clipped to the cube [-bound, bound]^n."""
    n = len(halfspaces[0][0])
    cube = box([-Fraction(bound)] * n, [Fraction(bound)] * n)
    return intersect_halfspaces(cube, halfspaces)
