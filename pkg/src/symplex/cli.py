"""Command line front end.

Every report is JSON carrying ``"schemaVersion": 1`` unless ``--format csv``
is requested, in which case index tables use the columns
``m, omega_p, omega_q, i, nu, method, crossings``.

Exit codes: 0 success, 1 an asserted invariant failed, 2 malformed input,
3 a numerical decision was ambiguous.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import core
from .angles import UnitAnglePoint
from .errors import (
    AmbiguousSpectrumError,
    DegenerateFormError,
    NotSymplecticError,
    RankAmbiguityError,
    SymplexError,
)
from .index import graph_index, maslov_type_index
from .iteration import bott_check, bott_sweep, iterate
from .krein import krein_numbers, splitting_numbers
from .paths import path_from_json

SCHEMA_VERSION = 1
INDEX_COLUMNS = ("m", "omega_p", "omega_q", "i", "nu", "method", "crossings")

EXIT_OK, EXIT_INVARIANT, EXIT_SCHEMA, EXIT_AMBIGUOUS = 0, 1, 2, 3


class SchemaError(ValueError):
    """Input that does not parse against the expected layout."""


class InvariantFailure(Exception):
    """Raised after the report is written, so the exit code can reflect it."""

    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


# -- input ---------------------------------------------------------------------


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if isinstance(obj, dict) and obj.get("schemaVersion", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schemaVersion {obj['schemaVersion']!r}")
    return obj


def load_matrix(path: str, tol: float) -> np.ndarray:
    """A matrix file is either a bare nested list or an object with ``entries``."""
    obj = _load_json(path)
    if isinstance(obj, list):
        obj = {"entries": obj}
    if not isinstance(obj, dict) or "entries" not in obj:
        raise SchemaError(f"{path}: expected an 'entries' field")
    try:
        return core.SymplecticMatrix.from_json(obj, tol).entries
    except NotSymplecticError:
        raise
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def load_path_object(path: str) -> dict:
    obj = _load_json(path)
    if not isinstance(obj, dict) or "rep" not in obj or "tau" not in obj:
        raise SchemaError(f"{path}: a path needs 'tau' and 'rep'")
    return obj


def build_path(obj: dict):
    try:
        return path_from_json(obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad path description: {exc}") from exc


def parse_omega(text: str) -> UnitAnglePoint:
    try:
        return UnitAnglePoint.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad omega {text!r}: {exc}") from exc


def parse_symmetry(text: str, n: int) -> core.SymmetryDescriptor:
    try:
        m, k, s = (int(x) for x in text.split(","))
        return core.SymmetryDescriptor(n, m, k, s)
    except ValueError as exc:
        raise SchemaError(f"bad --symmetry {text!r}: expected 'm,k,sMinus' ({exc})") from exc


# -- output --------------------------------------------------------------------


def omega_columns(w: UnitAnglePoint) -> tuple:
    if w.is_exact:
        return w.turns.numerator, w.turns.denominator
    return repr(float(w.turn_value)), ""


def index_row(m: int, w: UnitAnglePoint, rec) -> dict:
    p, q = omega_columns(w)
    return {"m": m, "omega_p": p, "omega_q": q, "i": rec.i_omega, "nu": rec.nu_omega,
            "method": rec.method, "crossings": len(rec.crossings)}


def audit_entry(path_obj: dict, m: int, omega: UnitAnglePoint, rec, P=None) -> dict:
    """What ``index --audit`` needs to recompute one emitted index."""
    entry = {"path": path_obj, "m": m, "omega": omega.to_json(), "method": rec.method, "muGraph": rec.mu}
    if P is None:
        entry.update({"iOmega": rec.i_omega, "nuOmega": rec.nu_omega})
    else:
        entry["P"] = np.asarray(P).tolist()
    return entry


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, UnitAnglePoint):
        return obj.to_json()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(report: dict) -> str:
    return json.dumps({"schemaVersion": SCHEMA_VERSION, **report}, indent=2, sort_keys=True,
                      default=_jsonable) + "\n"


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: r.get(c, "") for c in columns})
    return buf.getvalue()


def emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(args, report: dict, rows=None, columns=INDEX_COLUMNS, failure: str | None = None) -> int:
    """Write the report, then signal ``failure`` (if any) as an invariant violation."""
    if args.format == "csv":
        if rows is None:
            raise SchemaError(f"{args.command} has no CSV form")
        emit(args, render_csv(rows, columns))
    else:
        emit(args, render_json(report))
    if failure:
        raise InvariantFailure(report, failure)
    return EXIT_OK


# -- subcommands ---------------------------------------------------------------


def cmd_index(args) -> int:
    if args.audit:
        return cmd_audit(args)
    if not args.path:
        raise SchemaError("index needs --path (or --audit)")
    obj = load_path_object(args.path)
    path = build_path(obj)
    omega = parse_omega(args.omega)
    if args.symmetry_matrix:
        P = load_matrix(args.symmetry_matrix, args.tol)
        rec = graph_index(path, omega, P, args.method)
        report = {"command": "index", **rec.to_json(), "auditable": [audit_entry(obj, 1, omega, rec, P)]}
        return _finish(args, report, [index_row(1, omega, rec)])
    rec = maslov_type_index(path, omega, args.method)
    report = {"command": "index", **rec.to_json(), "auditable": [audit_entry(obj, 1, omega, rec)]}
    return _finish(args, report, [index_row(1, omega, rec)])


def _collect_auditable(obj) -> list:
    found = []
    if isinstance(obj, dict):
        for key, value in obj.items():
            if key == "auditable" and isinstance(value, list):
                found.extend(value)
            else:
                found.extend(_collect_auditable(value))
    elif isinstance(obj, list):
        for value in obj:
            found.extend(_collect_auditable(value))
    return found


def cmd_audit(args) -> int:
    """Recompute every index a report claims and compare."""
    entries = _collect_auditable(_load_json(args.audit))
    if not entries:
        raise SchemaError(f"{args.audit}: no auditable entries")
    results = []
    for e in entries:
        try:
            path = iterate(build_path(e["path"]), int(e["m"]))
            omega = UnitAnglePoint.from_json(e["omega"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad auditable entry: {exc}") from exc
        method = e.get("method", "auto")
        if "P" in e:
            rec = graph_index(path, omega, np.array(e["P"], dtype=float), method)
            got = {"muGraph": rec.mu}
        else:
            rec = maslov_type_index(path, omega, method)
            got = {"muGraph": rec.mu, "iOmega": rec.i_omega, "nuOmega": rec.nu_omega}
        claimed = {k: e[k] for k in got if k in e}
        results.append({"m": e["m"], "omega": e["omega"], "claimed": claimed, "recomputed": got,
                        "ok": all(got[k] == v for k, v in claimed.items())})
    report = {"command": "audit", "entries": len(results), "failures": sum(not r["ok"] for r in results),
              "results": results}
    failure = f"{report['failures']} index values did not re-verify" if report["failures"] else None
    return _finish(args, report, failure=failure)


def _flat_omega(rows) -> list[dict]:
    out = []
    for r in rows:
        p, q = omega_columns(UnitAnglePoint.from_json(r["omega"]))
        out.append({**r, "omega_p": p, "omega_q": q})
    return out


def _omegas_for(M, args) -> list[UnitAnglePoint]:
    if args.omega:
        return [parse_omega(args.omega)]
    return [w for w, _ in core.unit_spectrum(M)]


def cmd_splitting(args) -> int:
    M = load_matrix(args.matrix, args.tol)
    path = build_path(load_path_object(args.path)) if args.path else None
    rows = []
    for w in _omegas_for(M, args):
        s = splitting_numbers(M, w, path, args.method)
        k = krein_numbers(M, w)
        rows.append({"omega": w.to_json(), "sPlus": s.s_plus, "sMinus": s.s_minus, "pOmega": k.p_omega,
                     "qOmega": k.q_omega, "nullity": core.nullity(M, w), "method": s.method})
    return _finish(args, {"command": "splitting", "n": M.shape[0] // 2, "rows": rows},
                   _flat_omega(rows), ("omega_p", "omega_q", "sPlus", "sMinus", "pOmega", "qOmega", "nullity", "method"))


def cmd_krein(args) -> int:
    M = load_matrix(args.matrix, args.tol)
    rows = []
    for w in _omegas_for(M, args):
        k = krein_numbers(M, w)
        E = core.generalized_eigenspace(M, w)
        rows.append({"omega": w.to_json(), "pOmega": k.p_omega, "qOmega": k.q_omega,
                     "algebraicMultiplicity": E.dim, "nullity": core.nullity(M, w)})
    return _finish(args, {"command": "krein", "n": M.shape[0] // 2, "rows": rows},
                   _flat_omega(rows), ("omega_p", "omega_q", "pOmega", "qOmega", "algebraicMultiplicity", "nullity"))


def cmd_iterate(args) -> int:
    obj = load_path_object(args.path)
    base = build_path(obj)
    omega = parse_omega(args.omega)
    rows, entries = [], []
    for m in range(1, args.m + 1):
        rec = maslov_type_index(iterate(base, m), omega, args.method)
        rows.append(index_row(m, omega, rec))
        entries.append(audit_entry(obj, m, omega, rec))
    report = {"command": "iterate", "omega": omega.to_json(), "table": rows, "auditable": entries}
    return _finish(args, report, rows)


BOTT_COLUMNS = ("n", "m", "k", "sMinus", "check", "omega0_p", "omega0_q", "lhs", "rhs", "ok")


def _bott_row(res) -> dict:
    d = res.descriptor
    p, q = omega_columns(res.omega0)
    flat = lambda v: "/".join(str(x) for x in v) if isinstance(v, tuple) else v  # noqa: E731
    return {"n": d.n if d else "", "m": res.m, "k": d.k if d else "", "sMinus": d.s_minus if d else "",
            "check": res.which, "omega0_p": p, "omega0_q": q, "lhs": flat(res.lhs), "rhs": flat(res.rhs),
            "ok": res.equal, "label": res.label()}


def _omega_key(w: UnitAnglePoint) -> str:
    return str(w.turns) if w.is_exact else repr(float(w.turn_value))


def _bott_matrix(results, m_values, cell) -> tuple[list, list]:
    """Pivot to one row per ``omega0`` and one column per ``m``."""
    by_cell = {}
    for r in results:
        by_cell.setdefault((r.omega0.turns, r.m), []).append(r)
    omegas = sorted({k[0] for k in by_cell})
    columns = ["omega0"] + [f"m={m}" for m in m_values]
    rows = []
    for w in omegas:
        row = {"omega0": str(w)}
        for m in m_values:
            row[f"m={m}"] = cell(by_cell.get((w, m), []))
        rows.append(row)
    return rows, columns


def cmd_bott_verify(args) -> int:
    if args.path:
        if not (args.symmetry_matrix and args.m):
            raise SchemaError("a custom path needs --symmetry-matrix and --m")
        path = build_path(load_path_object(args.path))
        P = load_matrix(args.symmetry_matrix, args.tol)
        m_values = list(range(1, args.m + 1))
        omegas = sorted({w.turns for m in m_values for w in UnitAnglePoint.one().roots(m)})
        results = [bott_check(path, P, m, UnitAnglePoint(turns=w), which, closed_form=not args.generic)
                   for m in m_values for w in omegas for which in ("index", "nullity", "splitting")]

        def cell(rs):
            flat = lambda v: "+".join(str(x) for x in v) if isinstance(v, tuple) else str(v)  # noqa: E731
            r = next(x for x in rs if x.which == args.check)
            return f"{flat(r.lhs)}/{flat(r.rhs)}/{r.equal}"
    else:
        m_values = list(range(2, args.m_max + 1))
        results = bott_sweep(args.n_max, args.m_max, args.seed, closed_form=not args.generic)

        def cell(rs):
            return f"{sum(r.equal for r in rs)}/{len(rs)}" if rs else ""
    long_rows = [_bott_row(r) for r in results]
    report = {"command": "bott-verify", "seed": args.seed, "cells": len(long_rows),
              "failures": sum(not r["ok"] for r in long_rows), "results": long_rows}
    failure = f"{report['failures']} Bott cells failed" if report["failures"] else None
    if args.layout == "long":
        return _finish(args, report, long_rows, BOTT_COLUMNS, failure)
    rows, columns = _bott_matrix(results, m_values, cell)
    return _finish(args, report, rows, columns, failure)


def cmd_cijt(args) -> int:
    from .jump import cijt_search, index_profile

    objs = [load_path_object(p) for p in args.path]
    paths = [build_path(o) for o in objs]
    tuples = cijt_search(paths, args.nmax, args.window, args.m_budget, args.method)
    report = {"command": "cijt", "nmax": args.nmax, "window": args.window,
              "tuples": [t.to_json() for t in tuples],
              "profiles": [index_profile(p, args.profile_max, args.method).to_json() for p in paths]}
    if args.audit_window is not None:
        keys = {t.key() for t in tuples}
        wide = cijt_search(paths, args.nmax, args.audit_window, args.m_budget, args.method)
        report["auditWindow"] = args.audit_window
        report["missedByWindow"] = [t.to_json() for t in wide if t.key() not in keys]
    entries = []
    for t in tuples:
        for obj, m in zip(objs, t.ms):
            for j in (2 * m - 1, 2 * m, 2 * m + 1):
                p = build_path(obj)
                rec = maslov_type_index(iterate(p, j), UnitAnglePoint.one(), args.method)
                entries.append(audit_entry(obj, j, UnitAnglePoint.one(), rec))
    report["auditable"] = entries
    rows = [{"N": t.N, "ms": " ".join(str(m) for m in t.ms), "valid": t.valid} for t in tuples]
    failure = None if all(t.valid for t in tuples) else "an emitted tuple failed re-verification"
    return _finish(args, report, rows, ("N", "ms", "valid"), failure)


def cmd_ellipsoid(args) -> int:
    from .ellipsoid import EllipsoidSpec, end_to_end_verification, orbits

    try:
        E = EllipsoidSpec.parse(args.radii_squared)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad --radii-squared: {exc}") from exc
    d = parse_symmetry(args.symmetry, E.n)
    report = {"command": "ellipsoid", **end_to_end_verification(E, d)}
    one = UnitAnglePoint.one()
    rows, entries = [], []
    report["orbits"] = [{"plane": orb.plane, "period": orb.period, "angularSpeeds": [str(v) for v in orb.speeds],
                         "turns": [str(x) for x in orb.path.turns]} for orb in orbits(E)]
    for orb in orbits(E):
        obj = {"n": E.n, "tau": orb.path.tau, "rep": orb.path.to_json()["rep"]}
        for m in range(1, args.m_max + 1):
            rec = maslov_type_index(iterate(orb.path, m), one, "convex-count")
            if orb.plane == args.orbit:
                rows.append(index_row(m, one, rec))
            entries.append(audit_entry(obj, m, one, rec))
    report["auditable"] = entries
    failure = None if report["ok"] else "orbit count or an inequality margin failed"
    return _finish(args, report, rows, failure=failure)


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    report = run_selftest(args.seed)
    failure = f"{report['failures']} selftest checks failed" if report["failures"] else None
    return _finish(args, report, report["checks"], ("label", "ok", "detail"), failure)


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=core.DEFAULT_TOL,
                        help="symplecticity tolerance for input matrices (env SYMPLEX_TOL)")

    parser = argparse.ArgumentParser(prog="symplex", description="Index theory of symplectic paths.")
    sub = parser.add_subparsers(dest="command", required=True)
    methods = ("auto", "crossing-form", "convex-count")

    p = sub.add_parser("index", parents=[common], help="Maslov-type or graph index of one path")
    p.add_argument("--path")
    p.add_argument("--omega", default="exact:0/1")
    p.add_argument("--symmetry-matrix", help="left factor P; reports the graph index of P gamma")
    p.add_argument("--method", choices=methods, default="auto")
    p.add_argument("--audit", metavar="REPORT", help="recompute every index claimed in a report")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("splitting", parents=[common], help="splitting numbers at unit eigenvalues")
    p.add_argument("--matrix", required=True)
    p.add_argument("--omega")
    p.add_argument("--path", help="generating path, needed off the semisimple case")
    p.add_argument("--method", choices=("auto", "shortcut", "path-limit", "both"), default="auto")
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("krein", parents=[common], help="Krein signature counts at unit eigenvalues")
    p.add_argument("--matrix", required=True)
    p.add_argument("--omega")
    p.set_defaults(func=cmd_krein)

    p = sub.add_parser("iterate", parents=[common], help="index table of the iterates 1..m")
    p.add_argument("--path", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--omega", default="exact:0/1")
    p.add_argument("--method", choices=methods, default="auto")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("bott-verify", parents=[common], help="Bott-type sum formulas")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--m-max", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generic", action="store_true", help="use the segmented iterate even when a closed form exists")
    p.add_argument("--path", help="check one path instead of the random sweep")
    p.add_argument("--symmetry-matrix")
    p.add_argument("--m", type=int, help="largest iterate for a custom path")
    p.add_argument("--check", choices=("index", "nullity", "splitting"), default="index",
                   help="quantity shown in the matrix cells for a custom path")
    p.add_argument("--layout", choices=("matrix", "long"), default="matrix", help="CSV shape")
    p.set_defaults(func=cmd_bott_verify)

    p = sub.add_parser("cijt", parents=[common], help="common index jump tuples")
    p.add_argument("--path", action="append", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--window", type=int, default=2)
    p.add_argument("--m-budget", type=int, default=512)
    p.add_argument("--profile-max", type=int, default=4)
    p.add_argument("--audit-window", type=int, help="repeat the search with this wider window and list extra tuples")
    p.add_argument("--method", choices=methods, default="auto")
    p.set_defaults(func=cmd_cijt)

    p = sub.add_parser("ellipsoid", parents=[common], help="orbit count versus the multiplicity bound")
    p.add_argument("--radii-squared", required=True)
    p.add_argument("--symmetry", required=True, metavar="m,k,sMinus")
    p.add_argument("--m-max", type=int, default=3, help="iterates tabulated per orbit")
    p.add_argument("--orbit", type=int, default=0, help="orbit shown in CSV output")
    p.set_defaults(func=cmd_ellipsoid)

    p = sub.add_parser("selftest", parents=[common], help="deterministic battery of checks")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (AmbiguousSpectrumError, RankAmbiguityError, DegenerateFormError) as exc:
        print(f"numerical ambiguity: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (SchemaError, NotSymplecticError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SymplexError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
