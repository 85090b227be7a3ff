"""Command-line interface.  Every command prints a JSON document (or a flat text
rendering of it) and reports its outcome through the exit status:

    0  pass / holds      3  fails
    1  internal error     4  inconclusive
    2  usage, parse or input error
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .algebra import Algebra, dumps, isotope, opposite
from .catalog import FAMILIES, catalog_entries, catalog_source
from .hurwitz import INVINV_LABELS, hurwitz, invinv_algebra
from .identities import ParseError, check, check_exact_multilinear, is_balanced, parse_identity
from .normal_forms import FAMILIES as DATUM_FAMILIES
from .normal_forms import ClassDatum, membership, reduce
from .structure import d6_dims, fingerprint, left_inversion, morphism_residual, tder

SCHEMA = "divalg/1"
DEFAULT_SEED = 20240101
EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
VERDICT_EXIT = {"holds": EXIT_OK, "fails": EXIT_FAILS, "inconclusive": EXIT_INCONCLUSIVE}

HURWITZ_NAMES = {"R": 1, "C": 2, "H": 4, "O": 8}

EXPECTED_D6 = {
    "R": (1, 0, 0), "C-id": (2, 0, 0), "C-conj": (1, 1, 0), "H-id": (4, 0, 0),
    "H-22": (2, 2, 0), "H-111": (1, 1, 2), "O-id": (8, 0, 0), "O-44": (4, 4, 0),
    "O-222": (2, 2, 4), "O-113": (1, 1, 6),
}


class UsageError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_algebra(spec, tol=None):
    """A JSON path, a Hurwitz name (R, C, H, O) or an invinv label such as O-113."""
    if spec in HURWITZ_NAMES:
        A = hurwitz(HURWITZ_NAMES[spec])
    elif spec in INVINV_LABELS:
        A, _ = invinv_algebra(spec)
    else:
        try:
            A = Algebra.from_dict(_load_json(spec))
        except ValueError as exc:
            raise UsageError(f"{spec}: schema error: {exc}") from None
    if tol is not None:
        A = Algebra(A.constants, labels=A.labels, tol=tol, meta=A.meta)
    return A


def _load_matrix(path, n):
    data = _load_json(path)
    M = np.array(data.get("matrix") if isinstance(data, dict) else data, dtype=float)
    if M.shape != (n, n):
        raise UsageError(f"{path}: expected a {n} x {n} matrix, got shape {M.shape}")
    return M


def _emit(args, payload):
    payload = {"schema": SCHEMA, **payload}
    if args.format == "json":
        print(dumps(payload))
    else:
        for line in _text_lines(payload):
            print(line)


def _text_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _text_lines(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for i, v in enumerate(obj):
            yield from _text_lines(v, f"{prefix}{i}.")
    else:
        value = json.loads(dumps(obj)) if not isinstance(obj, str) else obj
        yield f"{prefix[:-1]}: {value}"


# ---- algebra

def cmd_algebra_build(args):
    sources = [x for x in (args.hurwitz, args.invinv, args.base) if x is not None]
    if len(sources) != 1:
        raise UsageError("give exactly one of --hurwitz, --invinv, --from")
    if args.hurwitz is not None:
        if args.hurwitz not in (1, 2, 4, 8):
            raise UsageError("--hurwitz takes 1, 2, 4 or 8")
        A = hurwitz(args.hurwitz)
    elif args.invinv is not None:
        A = load_algebra(args.invinv) if args.invinv in INVINV_LABELS else None
        if A is None:
            raise UsageError(f"unknown invinv label {args.invinv!r}; choose from {', '.join(INVINV_LABELS)}")
    else:
        A = load_algebra(args.base)
    if (args.alpha is None) != (args.beta is None):
        raise UsageError("--alpha and --beta go together")
    if args.alpha is not None:
        meta = A.meta
        A = isotope(A, _load_matrix(args.alpha, A.dim), _load_matrix(args.beta, A.dim))
        A.meta.update({k: v for k, v in meta.items() if k == "name"})
    if args.opposite:
        A = opposite(A)
    if args.tol is not None:
        A = Algebra(A.constants, labels=A.labels, tol=args.tol, meta=A.meta)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(A.to_dict()) + "\n")
    payload = {"command": "algebra build", "dim": A.dim}
    if args.out:
        payload["out"] = args.out
    if args.then == "describe":
        payload["fingerprint"] = fingerprint(A, seed=args.seed).to_dict()
    _emit(args, payload)
    return EXIT_OK


def cmd_algebra_describe(args):
    A = load_algebra(args.path, args.tol)
    _emit(args, {"command": "algebra describe", "fingerprint": fingerprint(A, seed=args.seed).to_dict()})
    return EXIT_OK


# ---- identities

def _identity_source(args):
    if (args.catalog is None) == (args.expr is None):
        raise UsageError("give exactly one of --catalog FAMILY:KEY or --expr IDENTITY")
    if args.expr is not None:
        return args.expr, None
    if ":" not in args.catalog:
        raise UsageError("--catalog expects FAMILY:KEY")
    family, key = args.catalog.split(":", 1)
    try:
        return catalog_source(family, key), args.catalog
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def cmd_identity_check(args):
    A = load_algebra(args.algebra, args.tol)
    src, name = _identity_source(args)
    try:
        identity = parse_identity(src)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.exact:
        if not is_balanced(identity):
            raise UsageError("--exact needs a balanced identity (each variable once per side, no divisions)")
        try:
            report = check_exact_multilinear(A, identity)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        report = check(A, identity, trials=args.trials, seed=args.seed, exact=False)
    payload = {"command": "identity check", "identity": str(identity)}
    if name:
        payload["catalog"] = name
    payload["report"] = report.to_dict()
    _emit(args, payload)
    return VERDICT_EXIT[report.verdict]


def cmd_identity_catalog(args):
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    rows = catalog_entries(args.family)
    _emit(args, {"command": "identity catalog", "family": args.family, "count": len(rows), "rows": rows})
    return EXIT_OK


# ---- structure

def cmd_tder(args):
    A = load_algebra(args.algebra, args.tol)
    _emit(args, {"command": "tder", **tder(A).to_dict()})
    return EXIT_OK


def cmd_inversion(args):
    A = load_algebra(args.algebra, args.tol)
    report = left_inversion(A, samples=args.samples, seed=args.seed)
    _emit(args, {"command": "inversion", **report.to_dict()})
    return EXIT_OK if report.has_left_inversion else EXIT_FAILS


def _verify_invinv(label, trials, seed):
    A, spec = invinv_algebra(label)
    base = hurwitz(A.dim)
    checks = {
        "relations": spec.relation_residual() < 1e-10,
        "sigma_automorphism": morphism_residual(base, base, spec.sigma) < 1e-10,
        "tau_automorphism": morphism_residual(base, base, spec.tau) < 1e-10,
    }
    d6 = d6_dims(spec.sigma, spec.tau)
    checks["d6_dims"] = d6 == EXPECTED_D6[label]
    report = check(A, parse_identity("x((yz)(xt))=((xy)(zx))t"), trials=trials, seed=seed, exact=False)
    checks["involutive_inversion_identity"] = report.verdict == "holds"
    fp = fingerprint(A, seed=seed)
    return label, checks, list(d6), report.max_residual, fp


def cmd_invinv_verify(args):
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(lambda lab: _verify_invinv(lab, args.trials, args.seed), INVINV_LABELS))
    rows, first_failure = [], None
    for label, checks, d6, res, fp in results:
        ok = all(checks.values())
        if not ok and first_failure is None:
            first_failure = f"{label}: {next(k for k, v in checks.items() if not v)}"
        rows.append({"label": label, "pass": ok, "checks": checks, "d6_dims": d6, "identity_residual": res})
    keys = [fp.key() for *_, fp in results]
    distinct = len(set(keys)) == len(keys)
    if not distinct and first_failure is None:
        first_failure = "fingerprints are not pairwise distinct"
    passed = sum(r["pass"] for r in rows)
    payload = {
        "command": "invinv-verify",
        "passed": passed,
        "total": len(rows),
        "fingerprints_distinct": distinct,
        "results": rows,
    }
    if first_failure:
        payload["first_failure"] = first_failure
    _emit(args, payload)
    return EXIT_OK if first_failure is None else EXIT_FAILS


def cmd_normal_form(args):
    data = _load_json(args.input)
    family = args.family or (data.get("family") if isinstance(data, dict) else None)
    if family not in DATUM_FAMILIES:
        raise UsageError(f"--family must be one of {', '.join(DATUM_FAMILIES)}")
    try:
        datum = ClassDatum.from_dict(data, family=family)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    record = reduce(datum)
    _emit(args, {"command": "normal-form", "record": record.to_dict(), "membership": membership(record)})
    return EXIT_OK if record.in_table else EXIT_INCONCLUSIVE


# ---- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="override the algebra tolerance")
    common.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="sampled trials (default 1000)")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker cap (default 4)")

    parser = argparse.ArgumentParser(prog="divalg", parents=[common], description="Real division algebra toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="build or describe algebras").add_subparsers(dest="action", required=True)
    b = alg.add_parser("build", parents=[common])
    b.add_argument("--hurwitz", type=int)
    b.add_argument("--invinv", metavar="LABEL")
    b.add_argument("--from", dest="base", metavar="PATH", help="start from an algebra JSON file")
    b.add_argument("--alpha", metavar="PATH", help="isotope with this left map (JSON matrix)")
    b.add_argument("--beta", metavar="PATH", help="isotope with this right map (JSON matrix)")
    b.add_argument("--opposite", action="store_true")
    b.add_argument("--out", metavar="PATH")
    b.add_argument("then", nargs="?", choices=("describe",), help="also print the fingerprint")
    b.set_defaults(func=cmd_algebra_build)
    d = alg.add_parser("describe", parents=[common])
    d.add_argument("path")
    d.set_defaults(func=cmd_algebra_describe)

    ident = sub.add_parser("identity", help="check identities").add_subparsers(dest="action", required=True)
    c = ident.add_parser("check", parents=[common])
    c.add_argument("--algebra", required=True, help="JSON path, R/C/H/O or an invinv label")
    c.add_argument("--catalog", metavar="FAMILY:KEY")
    c.add_argument("--expr", metavar="IDENTITY")
    c.add_argument("--exact", action="store_true", help="multilinear check over basis tuples")
    c.set_defaults(func=cmd_identity_check)
    cat = ident.add_parser("catalog", parents=[common])
    cat.add_argument("family")
    cat.set_defaults(func=cmd_identity_catalog)

    t = sub.add_parser("tder", parents=[common], help="ternary derivations")
    t.add_argument("--algebra", required=True)
    t.set_defaults(func=cmd_tder)

    inv = sub.add_parser("inversion", parents=[common], help="left-inversion test")
    inv.add_argument("--algebra", required=True)
    inv.add_argument("--samples", type=int, default=20)
    inv.set_defaults(func=cmd_inversion)

    v = sub.add_parser("invinv-verify", parents=[common], help="check the ten involutive-inversion algebras")
    v.set_defaults(func=cmd_invinv_verify)

    nf = sub.add_parser("normal-form", parents=[common], help="reduce a classification datum")
    nf.add_argument("--family", choices=DATUM_FAMILIES)
    nf.add_argument("--in", dest="input", required=True, metavar="PATH")
    nf.set_defaults(func=cmd_normal_form)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    for name, default in (("seed", DEFAULT_SEED), ("tol", None), ("trials", 1000), ("format", "json"), ("threads", 4)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"divalg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"divalg: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
