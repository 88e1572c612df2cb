"""Exact Newton-Okounkov bodies of toric divisors and jet-separation certificates."""

from .ratgeom import Polytope, contains, hull, minkowski_sum, slice_ge, translate, volume
from .valuation import MonomialSection, infinitesimal_valuation, jet_to_infinitesimal, transform_body
from .toric import (
    DivisorFamily,
    EvaluationPoint,
    ToricDivisorData,
    compute_mu,
    infinitesimal_body_fixed_point,
    jet_oracle_fixed_point,
    local_exponents,
    multipoint_bodies,
    okounkov_body_invariant_flag,
    sections,
)
from .jetsep import (
    certify_adjoint,
    certify_canonical_free,
    certify_jet_ample,
    cyclic_cover_rule,
    inverted_simplex,
    origin_membership,
    verify_certificate,
    xi_max,
)

__version__ = "0.1.0"

__all__ = [
    "Polytope", "contains", "hull", "minkowski_sum", "slice_ge", "translate", "volume",
    "MonomialSection", "infinitesimal_valuation", "jet_to_infinitesimal", "transform_body",
    "DivisorFamily", "EvaluationPoint", "ToricDivisorData", "compute_mu", "infinitesimal_body_fixed_point",
    "jet_oracle_fixed_point", "local_exponents", "multipoint_bodies", "okounkov_body_invariant_flag", "sections",
    "certify_adjoint", "certify_canonical_free", "certify_jet_ample", "cyclic_cover_rule", "inverted_simplex",
    "origin_membership", "verify_certificate", "xi_max",
]
