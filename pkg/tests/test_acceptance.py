"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (printed in the terminal summary) and
then asserts.  Tolerances and time budgets are pinned below.
"""

import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path


from okkit import jetsep as js
from okkit import ratgeom as rg
from okkit import surfaces as sf
from okkit import toric as tv
from okkit.cli import main
from okkit.toric import EvaluationPoint as Pt, ToricDivisorData as TD
from okkit.valuation import jet_matrix, jet_to_infinitesimal, transform_body

from conftest import ACCEPTANCE_LINES, xi_oracle

DATA = Path(__file__).resolve().parents[1] / "data"

TABLE_BUDGET = 1.0
THRESHOLD_BUDGET = 1.0
BRACKET_WIDTH = Fraction(1, 10**6)
PLANE_BUDGET = 10.0
SLICE_BUDGET = 10.0
VOLUME_BUDGET = 5.0
XI_REL_TOL = Fraction(1, 10**9)


def record(n: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def plane(d):
    return TD(rg.standard_simplex(d, 2))


def random_polytope(rng, dim, size=7, lo=-4, hi=4, origin=False):
    while True:
        pts = [tuple(rng.randint(lo, hi) for _ in range(dim)) for _ in range(size)]
        if origin:
            pts.append((0,) * dim)
        P = rg.hull(pts, dim=dim)
        if P.is_full_dimensional:
            return P


def random_smooth(rng):
    kind = rng.choice(["simplex", "box", "hirzebruch"])
    a = rng.randint(1, 3)
    if kind == "simplex":
        return TD.from_vertices([(0, 0), (a, 0), (0, a)])
    b = rng.randint(1, 3)
    r = 0 if kind == "box" else rng.randint(1, 2)
    return TD.from_vertices([(0, 0), (a + r * b, 0), (a, b), (0, b)])


# 1 ---------------------------------------------------------------------------


def test_criterion_1_surface_table():
    t0 = time.perf_counter()
    rows = [sf.table_row(ell) for ell in range(2, 21)]
    elapsed = time.perf_counter() - t0
    bad = [r["ell"] for r in rows
           if not (r["A2"] == 2 and r["AH"] == r["ell"] ** 2 - 2 * r["ell"] + 3
                   and r["m_D"] == r["ell"] ** 2 - 2 * r["ell"] + 3
                   and r["coefficient"] == r["ell"] ** 2 - 2 * r["ell"] + 7)]
    ok = not bad and elapsed < TABLE_BUDGET
    record(1, "surface table for ell=2..20", ok, f"mismatches={bad}, {elapsed:.3f}s < {TABLE_BUDGET}s")


# 2 ---------------------------------------------------------------------------


def test_criterion_2_threshold_brackets():
    t0 = time.perf_counter()
    bad = []
    for ell in range(2, 21):
        N = sf.n_ell(ell)
        lo, hi = sf.threshold_real(ell)
        encloses = lo * lo - N * lo + 1 <= 0 <= hi * hi - N * hi + 1
        if not (hi - lo <= BRACKET_WIDTH and N - 1 < lo and hi < N and encloses
                and math.ceil(lo) == math.ceil(hi) == sf.m_of_D(ell)):
            bad.append(ell)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < THRESHOLD_BUDGET
    record(2, "threshold bracketed strictly inside (N-1, N), ceiling = m(D)", ok,
           f"width <= 1e-6, mismatches={bad}, {elapsed:.3f}s < {THRESHOLD_BUDGET}s")


# 3 ---------------------------------------------------------------------------


def test_criterion_3_plane_family():
    t0 = time.perf_counter()
    problems = []
    p = Pt((0, 0))
    for d in range(3, 10):
        T = plane(d)
        target = js.inverted_simplex(d, 2)
        bodies = [tv.single_point_body(T, p.with_frame(f), 6) for f in tv.all_frames(2)]
        for b in bodies:
            samples_inside = all(target.contains_point(x)
                                 for s in tv.semigroup_samples(T, b.point, 6) for x in s.normalized())
            if not (samples_inside and b.level1 == target and b.polytope == target and b.exact):
                problems.append(f"d={d} body")
        certified = [k for k in range(0, d + 3)
                     if js.certify_adjoint({"v0": bodies}, 2, k)["conclusion"] == js.SEPARATES]
        if certified != list(range(0, d - 2)):
            problems.append(f"d={d} certified {certified}")
        # K + O(d) = O(d - 3): brute-force jet orders
        oracle = tv.adjoint_max_jet_order(T, p)
        if d > 3:
            twisted = plane(d - 3)
            oracle_ok = (tv.max_jet_order(twisted, p) == d - 3
                         and all(tv.jet_oracle_fixed_point(twisted, p, k) for k in certified)
                         and not tv.jet_oracle_fixed_point(twisted, p, d - 2))
        else:
            oracle_ok = True
        if not (oracle == d - 3 and oracle_ok and max(certified) == oracle):
            problems.append(f"d={d} oracle {oracle}")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < PLANE_BUDGET
    record(3, "plane O(d), d=3..9: body = inverted simplex, certified k_max = oracle k_max = d-3", ok,
           f"problems={problems}, {elapsed:.2f}s < {PLANE_BUDGET}s")


# 4 ---------------------------------------------------------------------------


def _slice_holds(T, pts, kmax, kind, t):
    full = tv.multipoint_bodies(T, pts, kmax, kind)
    shifted = tv.multipoint_bodies(T, pts, kmax, kind, shift=t)
    e1 = (t,) + (0,) * (T.dim - 1)
    return all(rg.slice_ge(a.polytope, t) == rg.translate(b.polytope, e1)
               and rg.slice_ge(a.inner, t) == rg.translate(b.inner, e1)
               for a, b in zip(full, shifted))


def test_criterion_4_slice_identity():
    t0 = time.perf_counter()
    line = TD.from_vertices([(0,), (2,)])
    line_pts = [Pt((0,)), Pt((2,))]
    failures = [f"line t={t}" for t in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
                if not _slice_holds(line, line_pts, 8, "infinitesimal", t)]
    quad = TD(rg.box([0, 0], [2, 2]))
    quad_pts = [Pt((0, 0)), Pt((2, 2))]
    mu = tv.compute_mu(quad, tv.DivisorFamily(quad_pts))
    for kind in tv.KINDS:
        for t in (Fraction(1, 3), Fraction(1, 2), Fraction(1)):
            if not (t < mu and _slice_holds(quad, quad_pts, 6, kind, t)):
                failures.append(f"quadric {kind} t={t}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < SLICE_BUDGET
    record(4, "slice identity on the line (kmax=8) and on O(2,2) of the quadric (kmax=6)", ok,
           f"failures={failures}, {elapsed:.2f}s < {SLICE_BUDGET}s")


# 5 ---------------------------------------------------------------------------


def test_criterion_5_volume_decomposition():
    t0 = time.perf_counter()
    line = TD.from_vertices([(0,), (2,)])
    bodies = tv.multipoint_bodies(line, [Pt((0,)), Pt((2,))], 8, "infinitesimal")
    unit = rg.hull([(0,), (1,)])
    single = tv.single_point_body(line, Pt((0,)), 8)
    total = sum(rg.volume(b.polytope) for b in bodies)
    decomposition = [b.polytope for b in bodies] == [unit, unit] and total == 2 == rg.volume(single.polytope)

    instances = [
        (line, [Pt((0,)), Pt((2,))], 8),
        (TD(rg.box([0, 0], [2, 2])), [Pt((0, 0)), Pt((2, 2))], 4),
        (TD(rg.box([0, 0], [2, 1])), [Pt((0, 0)), Pt((2, 0))], 4),
        (plane(2), [Pt((0, 0)), Pt((2, 0)), Pt((0, 2))], 4),
        (plane(3), [Pt((0, 0)), Pt((3, 0))], 3),
    ]
    containment_failures = []
    for T, pts, kmax in instances:
        for kind in tv.KINDS:
            for b in tv.multipoint_bodies(T, pts, kmax, kind):
                ref = tv.single_point_body(T, b.point, kmax, kind)
                if not (rg.contains(ref.polytope, b.polytope) and rg.contains(ref.inner, b.inner)):
                    containment_failures.append((T.polytope.vertices, b.index, kind))
    elapsed = time.perf_counter() - t0
    ok = decomposition and not containment_failures and elapsed < VOLUME_BUDGET
    record(5, "line O(2): bodies [0,1],[0,1], volumes sum to 2; multipoint inside single-point bodies", ok,
           f"containment failures={containment_failures}, {elapsed:.2f}s < {VOLUME_BUDGET}s")


# 6 ---------------------------------------------------------------------------


def test_criterion_6_transform():
    rng = random.Random(6)
    unimodular = all(abs(rg.det(jet_matrix(n))) == 1 for n in range(1, 7))
    unimodular &= jet_to_infinitesimal((1, 2)) == (3, 2)
    eps_ok = 0
    for _ in range(20):
        eps = Fraction(rng.randint(1, 200), rng.randint(1, 60))
        eps_ok += transform_body(rg.standard_simplex(eps, 2)) == js.inverted_simplex(eps, 2)
    vol_ok = 0
    for i in range(100):
        P = random_polytope(rng, 2 + i % 2, size=7 if i % 2 == 0 else 6)
        vol_ok += rg.volume(transform_body(P)) == rg.volume(P)
    ok = unimodular and eps_ok == 20 and vol_ok == 100
    record(6, "transform: unimodular, simplex -> inverted simplex, volume preserved", ok,
           f"{eps_ok}/20 simplices, {vol_ok}/100 volumes")


# 7 ---------------------------------------------------------------------------


def test_criterion_7_xi_max():
    rng = random.Random(7)
    agree = 0
    worst = Fraction(0)
    for i in range(100):
        P = random_polytope(rng, 2 + i % 2, size=6, lo=-3, hi=6, origin=True)
        exact = js.xi_max(P)
        oracle = xi_oracle(P)
        err = abs(exact - oracle) / max(exact, Fraction(1, 10**6))
        if exact == 0:
            err = abs(oracle)
        worst = max(worst, err)
        agree += err <= XI_REL_TOL
    sharp = 0
    for _ in range(20):
        xi = Fraction(rng.randint(0, 300), rng.randint(1, 40))
        n = rng.choice([1, 2, 3, 4])
        sharp += js.xi_max(js.inverted_simplex(xi, n)) == xi
    ok = agree == 100 and sharp == 20
    record(7, "xi_max matches the binary-search oracle and is sharp on inverted simplices", ok,
           f"{agree}/100 within 1e-9 relative (worst {float(worst):.2e}), {sharp}/20 exact")


# 8 ---------------------------------------------------------------------------


def test_criterion_8_subadditivity():
    rng = random.Random(8)
    p = Pt((0, 0))
    good = 0
    for i in range(20):
        T1, T2 = random_smooth(rng), random_smooth(rng)
        kind = tv.KINDS[i % 2]
        exact = rg.contains(tv.exact_body(T1 + T2, p, kind),
                            rg.minkowski_sum(tv.exact_body(T1, p, kind), tv.exact_body(T2, p, kind)))
        b1 = tv.single_point_body(T1, p, 2, kind).polytope
        b2 = tv.single_point_body(T2, p, 2, kind).polytope
        enumerated = rg.contains(tv.single_point_body(T1 + T2, p, 2, kind).polytope, rg.minkowski_sum(b1, b2))
        good += exact and enumerated
    record(8, "Minkowski sum of bodies inside the body of the sum", good == 20, f"{good}/20 pairs")


# 9 ---------------------------------------------------------------------------


CLI_CERTS = {
    "adjoint_plane5": ["certify", "--adjoint", "--input", DATA / "plane_O5.json", "--k", "2", "--frames", "all"],
    "adjoint_plane3": ["certify", "--input", DATA / "plane_O3.json", "--k", "1", "--kmax", "2"],
    "adjoint_multi": ["certify", "--multipoint", "--input", DATA / "quadric_O22.json", "--point", "v0,v1",
                      "--k", "0", "--kmax", "2"],
    "canonical_free": ["certify", "--canonical-free", "--multipoint", "--input", DATA / "quadric_O22.json",
                       "--m", "3", "--mD", "1", "--mD-evidence", "O(1,1) - K = O(3,3) is ample", "--k", "1",
                       "--frames", "all"],
    "surfaces": ["certify", "--surface", "--ell", "2..6", "--k", "1"],
}


def test_criterion_9_certificate_integrity(tmp_path, capsys):
    emitted, verified, identical = 0, 0, 0
    for name, argv in CLI_CERTS.items():
        outs = []
        for rerun in range(2):
            target = tmp_path / f"{name}_{rerun}.json"
            assert main([str(a) for a in argv] + ["--seed", "9", "--output", str(target)]) == 0
            outs.append(target.read_bytes())
        identical += outs[0] == outs[1]
        data = json.loads(outs[0])
        count = len(data.get("certificates", [data]))
        emitted += count
        if main(["verify-certificate", "--input", str(tmp_path / f"{name}_0.json")]) == 0:
            verified += count
    # library-level certificates, including a combined jet-ampleness claim
    quad = TD(rg.box([0, 0], [4, 4]))
    bodies = tv.multipoint_bodies(quad, [Pt((0, 0)), Pt((4, 4))], 1)
    sep = js.certify_adjoint({"v0": [bodies[0]], "v3": [bodies[1]]}, 2, 1)
    for cert in (sep, js.certify_jet_ample([sep], 1), sf.surface_certificate(9)):
        emitted += 1
        text = js.dumps(cert)
        verified += js.verify_certificate(json.loads(text)) == []
        identical += text == js.dumps(json.loads(text))
    capsys.readouterr()
    runs = len(CLI_CERTS) + 3
    ok = emitted == verified and identical == runs
    record(9, "every emitted certificate verifies; reruns are byte-identical", ok,
           f"{verified}/{emitted} verified, {identical}/{runs} identical reruns")
