"""okkit command line.

Exit status: 0 on success (including "not-certified" conclusions), 1 when
``verify-certificate`` finds a mismatch, 2 for unusable input, 3 when the
lattice-point cap is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import jetsep, surfaces, toric
from . import ratgeom as rg
from .toric import EvaluationPoint, ToricDivisorData

SCHEMA = "okkit/1"


class InputError(ValueError):
    pass


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def load_toric(path: str) -> tuple[ToricDivisorData, list[EvaluationPoint]]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if data.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"unsupported schema {data.get('schema')!r}")
    try:
        poly = data["polytope"]
        T = ToricDivisorData(rg.hull([rg.vec(v) for v in poly["vertices"]], dim=int(poly["dim"])))
        pts = [EvaluationPoint(tuple(int(Fraction(c)) for c in q["vertex"]), q.get("frame")) for q in data.get("points", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed toric divisor data in {path}: {exc}") from exc
    if not pts:
        pts = [EvaluationPoint(tuple(int(c) for c in v)) for v in T.polytope.vertices]
    for q in pts:
        T.vertex_index(q.vertex)
    return T, pts


def _select_points(pts: list[EvaluationPoint], choice: str | None) -> dict[str, EvaluationPoint]:
    """Map labels ``v<i>`` (index into the input points) to the selected points."""
    if choice is None:
        return {"v0": pts[0]}
    if choice == "all":
        return {f"v{i}": p for i, p in enumerate(pts)}
    out = {}
    for item in choice.split(","):
        item = item.strip()
        if not item.startswith("v") or not item[1:].isdigit() or int(item[1:]) >= len(pts):
            raise InputError(f"unknown point {item!r}; use v0..v{len(pts) - 1}")
        out[item] = pts[int(item[1:])]
    return out


def _frames(p: EvaluationPoint, choice: str | None) -> list[EvaluationPoint]:
    n = len(p.vertex)
    if choice is None:
        return [p]
    if choice == "all":
        return [p.with_frame(f) for f in toric.all_frames(n)]
    try:
        return [p.with_frame([int(c) for c in part.split(",")]) for part in choice.split(";")]
    except ValueError as exc:
        raise InputError(f"bad frame list {choice!r}: {exc}") from exc


def _frame_tuples(points: list[EvaluationPoint], choice: str | None) -> list[list[EvaluationPoint]]:
    options = [_frames(p, choice) for p in points]
    combos: list[list[EvaluationPoint]] = [[]]
    for opts in options:
        combos = [c + [o] for c in combos for o in opts]
    return combos


def _parse_ell(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(text)]


def _kind(args) -> str:
    return "infinitesimal" if args.infinitesimal else "flag"


def _vertices_csv(bodies: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["body", "vertex", "x", "y"])
    for i, b in enumerate(bodies):
        poly = b["polytope"]
        if poly["dim"] != 2:
            continue
        for j, v in enumerate(poly["vertices"]):
            w.writerow([i, j, v[0], v[1]])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_body(args) -> int:
    T, pts = load_toric(args.input)
    bodies = []
    for p in _select_points(pts, args.point).values():
        for q in _frames(p, args.frames):
            bodies.append(toric.single_point_body(T, q, args.kmax, _kind(args)).to_json())
    payload = {"schema": SCHEMA, "command": "body", "kmax": args.kmax, "seed": args.seed, "bodies": bodies}
    _emit(_dump(payload), args.output)
    if args.csv:
        Path(args.csv).write_text(_vertices_csv(bodies), encoding="utf-8")
    return 0


def cmd_multipoint(args) -> int:
    T, pts = load_toric(args.input)
    points = list(_select_points(pts, args.point or "all").values())
    if len(points) < 2:
        raise InputError("multipoint bodies need at least two points")
    bodies = []
    for combo in _frame_tuples(points, args.frames):
        for b in toric.multipoint_bodies(T, combo, args.kmax, _kind(args), shift=Fraction(args.shift)):
            rec = b.to_json()
            rec["volume"] = str(rg.volume(b.polytope))
            bodies.append(rec)
    payload = {"schema": SCHEMA, "command": "multipoint", "kmax": args.kmax, "seed": args.seed, "bodies": bodies}
    _emit(_dump(payload), args.output)
    if args.csv:
        Path(args.csv).write_text(_vertices_csv(bodies), encoding="utf-8")
    return 0


def _gather_bodies(T, labelled: dict[str, EvaluationPoint], args) -> dict[str, list]:
    bodies: dict[str, list] = {}
    labels = list(labelled)
    points = list(labelled.values())
    if len(points) == 1:
        for q in _frames(points[0], args.frames):
            bodies.setdefault(labels[0], []).append(toric.single_point_body(T, q, args.kmax, "infinitesimal"))
        return bodies
    for combo in _frame_tuples(points, args.frames):
        for b in toric.multipoint_bodies(T, combo, args.kmax, "infinitesimal"):
            bodies.setdefault(labels[b.index], []).append(b)
    return bodies


def cmd_certify(args) -> int:
    if args.surface:
        if args.ell is None:
            raise InputError("--surface needs --ell")
        certs = [surfaces.surface_certificate(ell, args.s, args.k) for ell in _parse_ell(args.ell)]
        payload = certs[0] if len(certs) == 1 else {"schema": SCHEMA, "certificates": certs}
        _emit(_dump(payload), args.output)
        return 0
    if not args.input:
        raise InputError("certify needs --input (or --surface)")
    T, pts = load_toric(args.input)
    if args.multipoint:
        labels = _select_points(pts, args.point or "all")
        if len(labels) < 2:
            raise InputError("--multipoint needs at least two points")
    else:
        labels = _select_points(pts, args.point)
        if len(labels) != 1:
            raise InputError("single-point certification takes one --point; use --multipoint for several")
    n = T.dim
    if args.canonical_free:
        if args.m is None or args.mD is None:
            raise InputError("--canonical-free needs --m and --mD")
        scaled = {lab: EvaluationPoint(tuple(args.m * c for c in p.vertex), p.frame) for lab, p in labels.items()}
        bodies = _gather_bodies(T.scaled(args.m), scaled, args)
        cert = jetsep.certify_canonical_free(bodies, args.m, args.mD, n, args.k,
                                             {"statement": args.mD_evidence} if args.mD_evidence else None,
                                             points=list(labels))
    else:
        bodies = _gather_bodies(T, labels, args)
        cert = jetsep.certify_adjoint(bodies, n, args.k, points=list(labels))
    cert["inputs"]["vertices"] = {lab: list(p.vertex) for lab, p in labels.items()}
    cert["inputs"]["seed"] = args.seed
    _emit(jetsep.dumps(cert), args.output)
    return 0


def cmd_surface_table(args) -> int:
    rows = [surfaces.table_row(ell, args.s) for ell in _parse_ell(args.ell)]
    cols = ["ell", "a", "b", "c", "A2", "AH", "N", "m_D", "coefficient"]
    if args.format == "json":
        text = _dump({"schema": SCHEMA, "command": "surface-table", "s": args.s, "rows": rows})
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    _emit(text, args.output)
    return 0


def cmd_oracle(args) -> int:
    T, pts = load_toric(args.input)
    results = []
    for p in _select_points(pts, args.point).values():
        rec = {
            "point": p.to_json(),
            "max_jet_order_D": toric.max_jet_order(T, p),
            "max_jet_order_K_plus_D": toric.adjoint_max_jet_order(T, p),
            "random_section_discrepancies": toric.random_section_oracle(
                T, p, args.kmax, samples=args.samples, seed=args.seed),
        }
        if args.k is not None:
            rec["k"] = args.k
            rec["separates_k_jets_D"] = toric.jet_oracle_fixed_point(T, p, args.k)
        results.append(rec)
    payload = {"schema": SCHEMA, "command": "oracle", "kmax": args.kmax, "seed": args.seed,
               "samples": args.samples, "results": results}
    _emit(_dump(payload), args.output)
    return 0


def cmd_verify(args) -> int:
    try:
        cert = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read certificate: {exc}") from exc
    certs = cert["certificates"] if "certificates" in cert else [cert]
    problems = []
    for i, c in enumerate(certs):
        c = {key: val for key, val in c.items()}
        # CLI-added bookkeeping that the engine does not recompute
        c["inputs"] = {key: val for key, val in c["inputs"].items() if key not in ("vertices", "seed")}
        problems += [f"[{i}] {p}" for p in jetsep.verify_certificate(c)]
    if problems:
        sys.stderr.write("\n".join(problems) + "\n")
        sys.stdout.write("MISMATCH\n")
        return 1
    sys.stdout.write(f"OK ({len(certs)} certificate{'s' if len(certs) != 1 else ''})\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="okkit", description="Newton-Okounkov bodies and jet-separation certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_input=True):
        p.add_argument("--input", required=need_input)
        p.add_argument("--output")
        p.add_argument("--kmax", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--point", help="v<i> (index into the input points), comma list, or 'all'")
        p.add_argument("--frames", help="'all' or ';'-separated permutations like '0,1;1,0'")

    p = sub.add_parser("body", help="single-point body at a fixed point")
    common(p)
    p.add_argument("--infinitesimal", action="store_true")
    p.add_argument("--csv", help="write 2-D vertices as CSV")
    p.set_defaults(func=cmd_body)

    p = sub.add_parser("multipoint", help="multipoint bodies")
    common(p)
    p.add_argument("--infinitesimal", action="store_true")
    p.add_argument("--shift", default="0", help="t for the divisor D - t * (sum of first flag divisors)")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_multipoint)

    p = sub.add_parser("certify", help="jet-separation certificate")
    common(p, need_input=False)
    p.add_argument("--k", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--adjoint", action="store_true", help="certify K_X + D (default)")
    mode.add_argument("--canonical-free", action="store_true", help="certify (m + m(D)) D")
    mode.add_argument("--surface", action="store_true", help="double cover of E x E, D_ell")
    p.add_argument("--multipoint", action="store_true")
    p.add_argument("--m", type=int)
    p.add_argument("--mD", type=int)
    p.add_argument("--mD-evidence", dest="mD_evidence")
    p.add_argument("--ell")
    p.add_argument("--s", type=int, default=4)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("surface-table", help="intersection numbers, m(D_ell) and coefficients")
    p.add_argument("--ell", required=True, help="A..B or a single value")
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_surface_table)

    p = sub.add_parser("oracle", help="brute-force jet oracle and random-section sampling")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify-certificate", help="re-check a stored certificate")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "kmax", 1) < 1:
        sys.stderr.write("okkit: --kmax must be at least 1\n")
        return 2
    try:
        return args.func(args)
    except toric.CapExceeded as exc:
        sys.stderr.write(f"okkit: {exc}\n")
        return 3
    except (InputError, ValueError) as exc:
        sys.stderr.write(f"okkit: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
