"""Inverted simplices and jet-separation certificates.

The criteria are sufficient conditions: an inverted simplex of size
``n + k + eps`` inside every infinitesimal body over the chosen points yields
k-jet separation of the adjoint divisor (or of ``(m + m(D)) D`` in the
canonical-free form).  ``eps > 0`` is never an input; the engine checks
``xi_max > n + k`` and records the witness ``eps = xi_max - n - k``.

Certificates are plain JSON-ready dicts with deterministic key order, so a
stored certificate can be re-verified by :func:`verify_certificate`.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Sequence

from . import ratgeom as rg
from .ratgeom import Polytope
from .toric import NOBody

SCHEMA = "okkit/1"

SEPARATES = "separates-k-jets-at-points"
SUPPORTED = "k-jet-ample-supported-on-Z"
JET_AMPLE = "k-jet-ample"
NOT_CERTIFIED = "not-certified"


class CertificateError(ValueError):
    pass


def inverted_simplex(xi, n: int) -> Polytope:
    """conv{0, xi e1, xi (e1 + e2), ..., xi (e1 + ... + en)}."""
    xi = Fraction(xi)
    if xi < 0:
        raise ValueError("inverted simplex size must be nonnegative")
    if n < 1:
        raise ValueError("dimension must be positive")
    pts = [[xi if j <= i else Fraction(0) for j in range(n)] for i in range(-1, n)]
    return rg.hull(pts, dim=n)


def xi_max(P: Polytope):
    """Largest xi with the inverted simplex of size xi inside P.

    Returns a Fraction, or ``math.inf`` when no facet bounds the direction.
    Raises ValueError when the origin is not in P.
    """
    n = P.dim
    if not P.contains_point([0] * n):
        raise ValueError("origin not in the body; xi_max is undefined")
    # partial sums e1 + ... + ei as the nonzero simplex directions
    dirs = [[1 if j <= i else 0 for j in range(n)] for i in range(n)]
    for a, _ in P.equations:
        if any(rg.dot(a, d) != 0 for d in dirs):
            return Fraction(0)
    best = math.inf
    for a, b in P.facets:
        top = max(rg.dot(a, d) for d in dirs)
        if top > 0:
            best = min(best, Fraction(b) / top)
    return best


def origin_membership(P: Polytope) -> bool:
    return P.contains_point([0] * P.dim)


def _fmt(x) -> str:
    return "inf" if x == math.inf else str(Fraction(x))


def _body_record(label: str, body, xi) -> dict:
    if isinstance(body, NOBody):
        rec = body.to_json()
        poly = body.polytope
    else:
        poly, meta = body
        rec = dict(meta)
        rec["polytope"] = poly.to_json()
    rec["point_label"] = label
    rec["xi_max"] = None if xi is None else _fmt(xi)
    return rec


def _assess(bodies: dict[str, list], n: int, k: int) -> tuple[dict, list[dict]]:
    """Shared hypothesis check: min over points and flags of xi_max > n + k."""
    records = []
    xs = []
    for label in sorted(bodies):
        for body in bodies[label]:
            poly = body.polytope if isinstance(body, NOBody) else body[0]
            exact = body.exact if isinstance(body, NOBody) else bool(body[1].get("exact", False))
            kmax = body.kmax if isinstance(body, NOBody) else body[1].get("kmax")
            xi = xi_max(poly) if origin_membership(poly) else None
            records.append(_body_record(label, body, xi))
            xs.append((Fraction(-1) if xi is None else xi, exact, kmax, len(records) - 1))
    threshold = n + k
    low = min(x for x, *_ in xs)
    minimizers = [i for x, _, _, i in xs if x == low]
    ok = low > threshold
    intermediate = {
        "xi_per_body": [r["xi_max"] for r in records],
        "xi_min": _fmt(low) if low >= 0 else None,
        "threshold": str(threshold),
        "epsilon": _fmt(low - threshold) if ok else None,
        "minimizing_bodies": minimizers,
    }
    if ok:
        status = "hypothesis verified"
    elif all(xs[i][1] for i in minimizers):
        status = "hypothesis fails on exact bodies"
    else:
        kmaxes = sorted({xs[i][2] for i in minimizers if not xs[i][1]}, key=str)
        status = f"inconclusive at kmax={','.join(str(x) for x in kmaxes)}"
    intermediate["status"] = status
    return intermediate, records


def _flags_checked(bodies: dict[str, list]) -> list:
    out = []
    for label in sorted(bodies):
        for body in bodies[label]:
            if isinstance(body, NOBody):
                out.append({"point": label, "flags": [q.to_json() for q in body.points]})
            else:
                out.append({"point": label, "flags": body[1].get("flags", "uniform by assumption")})
    return out


def _normalise(bodies, points) -> dict[str, list]:
    if not isinstance(bodies, dict):
        raise TypeError("bodies must map point labels to lists of bodies")
    out = {str(k): list(v) for k, v in bodies.items()}
    for p in points or []:
        if not out.get(str(p)):
            raise CertificateError(f"missing bodies for declared point {p}")
    if not out or any(not v for v in out.values()):
        raise CertificateError("every point needs at least one body")
    return out


def certify_adjoint(bodies: dict[str, list], n: int, k: int, points: Sequence[str] | None = None,
                    divisor: str = "D", assumptions: Sequence[str] = ()) -> dict:
    """Jet separation of K_X + D from infinitesimal (multipoint) bodies of D.

    ``bodies`` maps each point label to the bodies computed over that point,
    one per flag (tuple) checked.  A body is a :class:`NOBody` or a pair
    ``(Polytope, metadata)`` where metadata carries ``exact``/``kmax`` and the
    provenance of a bound supplied by an external argument.
    """
    bodies = _normalise(bodies, points)
    intermediate, records = _assess(bodies, n, k)
    multi = len(bodies) > 1
    certified = intermediate["epsilon"] is not None
    return _certificate(
        conclusion=SEPARATES if certified else NOT_CERTIFIED,
        theorem="multipoint-adjoint-jet-separation" if multi else "adjoint-jet-separation",
        inputs={"n": n, "k": k, "divisor": f"K_X + {divisor}", "points": sorted(bodies)},
        bodies=records,
        flags_checked=_flags_checked(bodies),
        intermediate=intermediate,
        assumptions=list(assumptions),
    )


def certify_canonical_free(bodies: dict[str, list], m: int, m_D: int, n: int, k: int,
                           m_D_evidence: dict | None, points: Sequence[str] | None = None,
                           divisor: str = "D", assumptions: Sequence[str] = ()) -> dict:
    """Jet separation of ``(m + m(D)) D`` from bodies of ``mD``.

    ``m_D_evidence`` documents why ``m(D) D - K_X`` is ample; it is required.
    """
    if not m_D_evidence:
        raise CertificateError("m(D) needs ampleness evidence")
    if m < 1:
        raise ValueError("m must be a positive integer")
    bodies = _normalise(bodies, points)
    intermediate, records = _assess(bodies, n, k)
    multi = len(bodies) > 1
    certified = intermediate["epsilon"] is not None
    return _certificate(
        conclusion=SEPARATES if certified else NOT_CERTIFIED,
        theorem="canonical-free-multipoint-jet-separation" if multi else "canonical-free-jet-separation",
        inputs={
            "n": n,
            "k": k,
            "m": m,
            "m_D": m_D,
            "m_D_evidence": m_D_evidence,
            "divisor": f"({m + m_D})*{divisor}",
            "points": sorted(bodies),
        },
        bodies=records,
        flags_checked=_flags_checked(bodies),
        intermediate=intermediate,
        assumptions=list(assumptions),
    )


def certify_jet_ample(certificates: Sequence[dict], k: int, all_points: bool = False,
                      assumptions: Sequence[str] = ()) -> dict:
    """Combine separation certificates covering k+1 points into a jet-ampleness claim.

    Without ``all_points`` the conclusion is restricted to the listed points;
    ``all_points=True`` records the caller's assertion that the hypothesis
    holds for every (k+1)-point set.
    """
    points = sorted({p for c in certificates for p in c["inputs"]["points"]})
    if len(points) < k + 1:
        raise CertificateError(f"k={k} needs k+1={k + 1} points, got {len(points)}")
    divisors = {c["inputs"]["divisor"] for c in certificates}
    if len(divisors) != 1:
        raise CertificateError(f"certificates concern different divisors: {sorted(divisors)}")
    ok = all(c["conclusion"] == SEPARATES and c["inputs"]["k"] >= k for c in certificates)
    if not ok:
        conclusion = NOT_CERTIFIED
    else:
        conclusion = JET_AMPLE if all_points else SUPPORTED
    extra = list(assumptions)
    if all_points:
        extra.append("hypothesis holds for every (k+1)-point set (asserted by caller)")
    return _certificate(
        conclusion=conclusion,
        theorem="jet-ampleness-from-multipoint-separation",
        inputs={"k": k, "divisor": divisors.pop(), "points": points, "Z": points, "all_points": all_points},
        bodies=[],
        flags_checked=[],
        intermediate={"components": list(certificates)},
        assumptions=extra,
    )


def cyclic_cover_rule(checks: Sequence[bool], k: int, d: int) -> str:
    """pi^*L is k-jet ample if L - qM is (k-q)-jet ample for q = 0..min(k, d-1).

    ``checks[q]`` is the truth of the q-th hypothesis.  One-directional: a
    False entry gives "not-certified", never a disproof.
    """
    need = min(k, d - 1) + 1
    if len(checks) != need:
        raise ValueError(f"expected {need} checks for k={k}, d={d}, got {len(checks)}")
    return "certified" if all(checks) else NOT_CERTIFIED


def _certificate(**fields) -> dict:
    cert = {"schema": SCHEMA}
    cert.update(fields)
    return json.loads(json.dumps(cert, sort_keys=True))


def dumps(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def verify_certificate(cert: dict) -> list[str]:
    """Re-derive a stored certificate; returns a list of mismatches (empty if valid)."""
    problems: list[str] = []
    if cert.get("schema") != SCHEMA:
        problems.append(f"schema {cert.get('schema')!r} != {SCHEMA!r}")
    theorem = cert.get("theorem", "")
    if theorem == "jet-ampleness-from-multipoint-separation":
        for i, sub in enumerate(cert["intermediate"]["components"]):
            problems += [f"component {i}: {p}" for p in verify_certificate(sub)]
        try:
            again = certify_jet_ample(
                cert["intermediate"]["components"],
                cert["inputs"]["k"],
                cert["inputs"]["all_points"],
                [a for a in cert["assumptions"] if "asserted by caller" not in a],
            )
        except CertificateError as exc:
            return problems + [str(exc)]
        if again != cert:
            problems.append("recombined jet-ampleness certificate differs")
        return problems

    bodies: dict[str, list] = {}
    for rec in cert["bodies"]:
        poly = Polytope.from_json(rec["polytope"])
        if poly.to_json() != rec["polytope"]:
            problems.append(f"stored H-description of body at {rec['point_label']} does not match its vertices")
        meta = {key: val for key, val in rec.items() if key not in ("polytope", "point_label", "xi_max")}
        bodies.setdefault(rec["point_label"], []).append((poly, meta))
        xi = xi_max(poly) if origin_membership(poly) else None
        if (None if xi is None else _fmt(xi)) != rec["xi_max"]:
            problems.append(f"xi_max of body at {rec['point_label']} recomputes to {xi}")

    inputs = cert["inputs"]
    n, k = inputs["n"], inputs["k"]
    intermediate, records = _assess(bodies, n, k)
    if json.loads(json.dumps(records, sort_keys=True)) != cert["bodies"]:
        problems.append("body records do not reproduce")
    if json.loads(json.dumps(_flags_checked(bodies), sort_keys=True)) != cert["flags_checked"]:
        problems.append("flags_checked does not reproduce")
    for key in ("xi_min", "threshold", "epsilon", "status", "minimizing_bodies", "xi_per_body"):
        if intermediate[key] != cert["intermediate"].get(key):
            problems.append(f"intermediate {key}: stored {cert['intermediate'].get(key)!r}, recomputed {intermediate[key]!r}")
    certified = intermediate["epsilon"] is not None
    expected = SEPARATES if certified else NOT_CERTIFIED
    if cert["conclusion"] != expected:
        problems.append(f"conclusion {cert['conclusion']!r} but hypotheses give {expected!r}")
    if certified:
        size = Fraction(intermediate["xi_min"])
        simplex = inverted_simplex(size, n)
        for label, items in bodies.items():
            for poly, _ in items:
                if not rg.contains(poly, simplex):
                    problems.append(f"inverted simplex of size {size} not contained in a body at {label}")
    if theorem.startswith("canonical-free"):
        if not inputs.get("m_D_evidence"):
            problems.append("canonical-free certificate lacks m(D) evidence")
        if inputs.get("divisor", "").split("*")[0] != f"({inputs['m'] + inputs['m_D']})":
            problems.append("divisor coefficient is not m + m(D)")
        ev = inputs.get("m_D_evidence") or {}
        if "ell" in ev:
            from .surfaces import m_of_D

            if m_of_D(int(ev["ell"])) != inputs["m_D"]:
                problems.append("m(D) does not match the abelian-surface search")
    return problems
