"""Flag valuations of monomial sections.

A section is a finite sum of monomials in local coordinates ``x_1..x_n`` at a
point; coefficients are only tracked as "nonzero", so no cancellation is
modelled.  The infinitesimal valuation reads the lowest total degree first and
then the remaining exponents of one distinguished lowest-degree monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ratgeom import Polytope, linear_image

ORDERS = ("lex", "flag")


@dataclass(frozen=True)
class MonomialSection:
    terms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a section needs at least one term")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("exponents must be pairwise distinct")
        if len({len(t) for t in self.terms}) != 1:
            raise ValueError("exponents of mixed length")

    @classmethod
    def of(cls, terms: Iterable[Sequence[int]]) -> "MonomialSection":
        return cls(tuple(sorted({tuple(int(e) for e in t) for t in terms})))

    @property
    def dim(self) -> int:
        return len(self.terms[0])

    def times_monomial(self, u: Sequence[int]) -> "MonomialSection":
        return MonomialSection.of(tuple(a + b for a, b in zip(t, u)) for t in self.terms)

    def to_json(self) -> dict:
        return {"terms": [list(t) for t in self.terms]}

    @classmethod
    def from_json(cls, data: dict) -> "MonomialSection":
        return cls.of(data["terms"])


def _select(candidates: list[tuple[int, ...]], order: str) -> tuple[int, ...]:
    if order == "lex":
        # ascending lex on (w_1, ..., w_n)
        return min(candidates)
    if order == "flag":
        # smallest (w_2, ..., w_n): orders of vanishing along the later flag members
        return min(candidates, key=lambda w: w[1:])
    raise ValueError(f"unknown monomial order {order!r}; expected one of {ORDERS}")


def infinitesimal_valuation(s: MonomialSection, order: str = "lex") -> tuple[int, ...]:
    """Return ``(|w*|, w*_2, ..., w*_n)`` for the selected lowest-degree term ``w*``.

    ``order`` picks the monomial among the lowest-degree terms: ``"lex"`` is
    the ascending lexicographic minimum, ``"flag"`` minimises the trailing
    exponents instead.
    """
    low = min(sum(t) for t in s.terms)
    w = _select([t for t in s.terms if sum(t) == low], order)
    return (low,) + w[1:]


def jet_to_infinitesimal(v: Sequence) -> tuple:
    """(v_1, ..., v_n) -> (v_1 + ... + v_n, v_2, ..., v_n)."""
    v = tuple(v)
    if not v:
        return v
    return (sum(v),) + v[1:]


def jet_matrix(n: int) -> list[list[int]]:
    """Matrix of :func:`jet_to_infinitesimal`: all-ones first row over the identity."""
    return [[1] * n] + [[int(i == j) for j in range(n)] for i in range(1, n)]


def transform_body(P: Polytope) -> Polytope:
    """Image of a jet-valuation body in infinitesimal coordinates."""
    return linear_image(P, jet_matrix(P.dim))
