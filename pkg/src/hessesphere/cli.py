"""hesse-sphere: certify, build and probe solutions of H(F) = kappa F^m."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import catalog, construct, geometry, lsa
from .polyring import ParseError, Poly, RationalFn, parse_poly, to_text
from .verify import (CONSTANT, DEFAULT_SEED, DEFAULT_TRIALS, Relation, infer_kappa_pit,
                     infer_power_relation, verify_exponential_relation, verify_power_relation_pit)

EXIT_OK, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2
GEOM_SEED = 0


class UsageError(Exception):
    pass


def threads() -> int:
    raw = os.environ.get("HESSE_SPHERE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"HESSE_SPHERE_THREADS must be an integer, got {raw!r}")


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _vector(text: Optional[str]) -> Optional[List[Fraction]]:
    if text is None:
        return None
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a comma-separated vector: {text!r}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


# -- input resolution ---------------------------------------------------------------

def _source(args):
    """(poly, catalog entry or None) from --poly, --file or --catalog."""
    given = [x for x in (args.poly, args.file, args.catalog) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --poly, --file, --catalog")
    if args.catalog is not None:
        entry = catalog.get(args.catalog)
        return entry.poly, entry
    text = args.poly if args.poly is not None else Path(args.file).read_text()
    return parse_poly(text.strip()), None


def _operand(text: str):
    """A catalog id or an inline polynomial, with its certified relation."""
    try:
        entry = catalog.get(text)
    except KeyError:
        P = parse_poly(text)
        rel = infer_power_relation(P)
        if rel is None:
            raise UsageError(f"no relation H(P) = kappa P^m certified for {text!r}")
        return P, rel
    if entry.is_rational():
        raise UsageError(f"{text} is a rational function")
    return entry.poly, catalog.certify(entry)


# -- verify -------------------------------------------------------------------------

def cmd_verify(args, out) -> int:
    P, entry = _source(args)
    report = {"poly": to_text(P) if isinstance(P, Poly) else str(P), "nvars": P.nvars}
    if args.exp is not None:
        if not isinstance(P, Poly):
            raise UsageError("--exp needs a polynomial")
        rel = verify_exponential_relation(P, _vector(args.exp))
        report["certificate"] = rel.to_dict() if rel else None
        _emit(report, out)
        return EXIT_OK if rel is not None and rel.holds else EXIT_REFUTED
    if entry is not None and args.kappa is None and args.m is None:
        rel = catalog.certify(entry, trials=args.trials, seed=args.seed)
        report["id"] = entry.id
    elif args.m is not None:
        m = args.m
        kappa = _fraction(args.kappa) if args.kappa is not None else infer_kappa_pit(P, m, seed=args.seed)
        if P.nvars <= catalog.EXACT_MAX_VARS:
            found = infer_power_relation(P)
            rel = Relation("power", kappa, m, holds=bool(found and found.same_identity(Relation("power", kappa, m))))
            if found is not None and not rel.holds:
                rel.note = f"exact relation is kappa={found.kappa}, m={found.m}"
        else:
            rel = verify_power_relation_pit(P, kappa, m, trials=args.trials, seed=args.seed)
    elif args.kappa is not None:
        raise UsageError("--kappa needs --m")
    else:
        if P.nvars > catalog.EXACT_MAX_VARS:
            raise UsageError(f"{P.nvars} variables: give --m (and optionally --kappa) for a PIT certificate")
        rel = infer_power_relation(P)
    report["certificate"] = rel.to_dict() if rel is not None else None
    if rel is not None and rel.kind == CONSTANT:
        report["certificate"]["kind"] = "constant-zero"
    _emit(report, out)
    return EXIT_OK if rel is not None and rel.holds else EXIT_REFUTED


# -- catalog ------------------------------------------------------------------------

def _certify_id(args):
    entry_id, trials, seed = args
    return catalog.certify(catalog.get(entry_id), trials=trials, seed=seed).to_dict()


def _entry_text(entry) -> str:
    if isinstance(entry.poly, RationalFn):
        return f"({to_text(entry.poly.num)}) / ({to_text(entry.poly.den)})"
    return to_text(entry.poly)


def cmd_catalog(args, out) -> int:
    if args.action == "list":
        ids = catalog.catalog_ids()
        if not args.certify:
            _emit(ids, out)
            return EXIT_OK
        jobs = [(i, args.trials, args.seed) for i in ids]
        n = threads()
        if n > 1:
            with ProcessPoolExecutor(max_workers=n) as pool:
                certs = list(pool.map(_certify_id, jobs))
        else:
            certs = [_certify_id(j) for j in jobs]
        _emit({i: c for i, c in zip(ids, certs)}, out)
        return EXIT_OK if all(c["holds"] for c in certs) else EXIT_REFUTED
    if args.id is None:
        raise UsageError("catalog show needs an id")
    entry = catalog.get(args.id)
    cert = catalog.certify(entry, trials=args.trials, seed=args.seed)
    _emit({"id": entry.id, "poly": _entry_text(entry), "nvars": entry.nvars, "citation": entry.citation,
           "params": entry.params, "expected": entry.expected.to_dict(), "certificate": cert.to_dict()}, out)
    return EXIT_OK if cert.holds else EXIT_REFUTED


# -- construct ----------------------------------------------------------------------

def cmd_construct(args, out) -> int:
    op = args.op
    if op == "power":
        P, rel = _operand(args.operands[0])
        R, new = construct.power(P, rel, args.q)
    elif op == "compose":
        if len(args.operands) != 2:
            raise UsageError("compose needs two operands")
        P, relP = _operand(args.operands[0])
        Q, relQ = _operand(args.operands[1])
        R, new = construct.tensor_compose(P, relP, args.a, Q, relQ, args.b)
    elif op == "addvar":
        P, rel = _operand(args.operands[0])
        R, new = construct.add_variable(P, rel)
    elif op == "radial":
        P, rel = _operand(args.operands[0])
        R, new = construct.radial_graph(P, rel)
    elif op == "graph":
        R, new = construct.graph_power(parse_poly(args.operands[0]), args.l)
    else:  # modsq
        if len(args.operands) != 2 or args.kappa is None:
            raise UsageError("modsq needs RE IM operands and --kappa a,b")
        kap = _vector(args.kappa)
        if len(kap) != 2:
            raise UsageError("--kappa for modsq is 'real,imag'")
        R, new = construct.modulus_square(parse_poly(args.operands[0]), parse_poly(args.operands[1]),
                                          tuple(kap), args.k)
    _emit({"poly": to_text(R), "nvars": R.nvars, "certificate": new.to_dict()}, out)
    return EXIT_OK


# -- lsa ----------------------------------------------------------------------------

def _algebra(args) -> lsa.LSA:
    if (args.file is None) == (args.fixture is None):
        raise UsageError("give exactly one of --file, --fixture")
    if args.file is not None:
        return lsa.LSA.from_json(Path(args.file).read_text(), name=args.file)
    return lsa.fixture(args.fixture)


def cmd_lsa(args, out) -> int:
    if args.action == "cayley":
        if args.n is None:
            raise UsageError("lsa cayley needs --n")
        A = lsa.cayley_algebra(args.n)
        ok, bad = lsa.check_lsa(A)
        P = lsa.characteristic_polynomial(A)
        rec = lsa.cayley_recursion_poly(args.n)
        phi = lsa.cayley_phi(args.n)
        _emit({"n": args.n, "left_symmetric": ok, "violation": bad, "charpoly": to_text(P),
               "matches_recursion": P == rec, "phi": to_text(phi),
               "phi_recursion": lsa.phi_recursion_holds(args.n)}, out)
        return EXIT_OK if ok and P == rec else EXIT_REFUTED
    A = _algebra(args)
    if args.action == "verify":
        ok, bad = lsa.check_lsa(A)
        jac, jbad = lsa.check_jacobi(A)
        _emit({"name": A.name, "dim": A.dim, "left_symmetric": ok, "violation": bad,
               "jacobi": jac, "jacobi_violation": jbad}, out)
        return EXIT_OK if ok and jac else EXIT_REFUTED
    if args.action == "charpoly":
        _emit({"name": A.name, "dim": A.dim, "charpoly": to_text(lsa.characteristic_polynomial(A))}, out)
        return EXIT_OK
    report = lsa.completely_solvable_pipeline(A)
    _emit(report.to_dict(), out)
    return EXIT_OK if report.certified else EXIT_REFUTED


# -- geom ---------------------------------------------------------------------------

def _floats(v):
    return None if v is None else [float(x) for x in v]


def cmd_geom(args, out) -> int:
    P, entry = _source(args)
    if not isinstance(P, Poly):
        raise UsageError("geometry needs a polynomial")
    mode = "exp" if args.exp else "poly"
    if args.action == "normal":
        if args.point is None:
            raise UsageError("geom normal needs --point")
        s = geometry.level_sample_at(P, _floats(_vector(args.point)), mode)
        return _emit_samples([s], args, out)
    r = float(_fraction(args.level)) if args.level is not None else None
    if r is None:
        raise UsageError("--level is required")
    anchor, origin = _floats(_vector(args.anchor)), _floats(_vector(args.origin))
    surf = geometry.Surface(P, mode)
    pts = geometry.sample_level_set(surf, r, args.samples, args.seed, anchor, origin)
    if args.action == "sample":
        return _emit_samples(surf.samples_at(pts), args, out)
    if args.action == "sphere-test":
        v = geometry.classify_samples(surf.samples_at(pts), args.tol)
        _emit(v.to_dict(), out)
        return EXIT_REFUTED if v.kind == geometry.NOT_A_SPHERE else EXIT_OK
    rep = geometry.isoparametric_checks(P, pts, args.tol)
    d = {k: (bool(v) if hasattr(v, "dtype") and v.dtype == bool else (float(v) if hasattr(v, "dtype") else v))
         for k, v in rep.to_dict().items()}
    _emit(d, out)
    ok = rep.euclid_ok and rep.mu_wedge_ok is not False
    return EXIT_OK if ok else EXIT_REFUTED


def _emit_samples(samples, args, out) -> int:
    if args.csv:
        out.write(geometry.samples_to_csv(samples))
    else:
        _emit([s.to_dict() for s in samples], out)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------

def _source_flags(p):
    p.add_argument("--poly", help="polynomial text, e.g. 'x1*x2*x3'")
    p.add_argument("--file", help="file holding a polynomial (or LSA JSON for lsa)")
    p.add_argument("--catalog", help="catalog id")


def _pit_flags(p):
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hesse-sphere", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="certify H(P) = kappa P^m or H(e^P) = kappa e^{mP}")
    _source_flags(p)
    _pit_flags(p)
    p.add_argument("--kappa", help="expected kappa (rational)")
    p.add_argument("--m", type=int, help="expected exponent m")
    p.add_argument("--exp", metavar="V", help="check the exponential relation for direction V, e.g. 0,0,1")
    p.add_argument("--json", action="store_true", help="JSON output (default)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list or show catalog entries")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("id", nargs="?")
    p.add_argument("--certify", action="store_true", help="with list: certify every entry")
    _pit_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("construct", help="build new solutions from certified ones")
    p.add_argument("op", choices=["power", "compose", "addvar", "radial", "modsq", "graph"])
    p.add_argument("operands", nargs="+", help="catalog ids or polynomials")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--k", type=int, help="degree for modsq")
    p.add_argument("--kappa", help="complex kappa 're,im' for modsq")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("lsa", help="left-symmetric algebra tools")
    p.add_argument("action", choices=["verify", "charpoly", "pipeline", "cayley"])
    p.add_argument("--file", help="LSA JSON {dim, c: [[i,j,k,'p/q'], ...]}")
    p.add_argument("--fixture", help="built-in algebra: " + ", ".join(sorted(lsa.FIXTURES)))
    p.add_argument("--n", type=int, help="dimension for cayley")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lsa)

    p = sub.add_parser("geom", help="equiaffine geometry of level sets")
    p.add_argument("action", choices=["sample", "normal", "sphere-test", "iso"])
    _source_flags(p)
    p.add_argument("--level", help="level r (rational)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=GEOM_SEED)
    p.add_argument("--tol", type=float, default=geometry.CENTER_TOL)
    p.add_argument("--anchor", help="point on or near the wanted sheet")
    p.add_argument("--origin", help="base point of the sampling rays (default 0)")
    p.add_argument("--point", help="point for geom normal")
    p.add_argument("--exp", action="store_true", help="use level sets of e^P")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_geom)
    return ap


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ParseError, KeyError, OSError) as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except (construct.ConstructionError, geometry.LevelSetEmpty, geometry.DegeneratePoint) as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except ValueError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
