"""Command line driver: build, check, solve, extract, certify, export-motive."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import groups
from .errors import (BudgetExhausted, DegreeNotOne, DGWError, InvariantViolated, NonUnitDenominator,
                     NotIntegral, SingularReduction)
from .fields import small_field
from .funcfield import Poly, is_irreducible, make_place, places_up_to, poly_str
from .module import FrobModule, check_existence_hypothesis, export_pre_t_motive, reduce_module_at
from .nori import SlInstance, build_instance, search_nori_parameters
from .pipeline import thread_count
from .series import TruncSeriesMatrix, parse_bivar, series_charpoly
from .solver import (DEFAULT_M_MAX, extract_witness, fundamental_residual, normalize_to_sl,
                     solve_truncated)

log = logging.getLogger("dgw")

EXIT_OK, EXIT_INVARIANT, EXIT_INTEGRALITY, EXIT_NO_WITNESS, EXIT_CERTIFICATE = 0, 2, 3, 4, 5
EXIT_USAGE, EXIT_PARSE = 64, 65

REPORT_SCHEMA = "dgw.report/1"


class UsageError(Exception):
    pass


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --- json helpers --------------------------------------------------------------

def _fmt(obj, indent: int) -> str:
    flat = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    if len(flat) + indent <= 100 or not isinstance(obj, (dict, list)) or not obj:
        return flat
    pad = " " * (indent + 1)
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(k)}: {_fmt(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    items = [pad + _fmt(v, indent + 1) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"


def dumps(obj) -> str:
    """Sorted, deterministic JSON; short arrays stay on one line."""
    return _fmt(obj, 0) + "\n"


def emit(obj, out: str | None):
    text = dumps(obj)
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def load_module(path: str) -> tuple[FrobModule, dict]:
    obj = load_json(path)
    try:
        return FrobModule.from_json(obj), obj
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: not a module: {exc}") from None


def parse_element(F, text: str) -> int:
    try:
        val = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"bad field element {text!r}") from None
    try:
        return F.from_json(val)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad field element {text!r}: {exc}") from None


def parse_place(F, text: str):
    try:
        b = parse_bivar(F, text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(b.tc) != 1:
        raise UsageError("a place is a polynomial in s alone")
    pi = b.tc[0]
    if pi.deg < 1 or pi.lead() != 1 or not is_irreducible(pi):
        raise UsageError(f"{text!r} is not monic irreducible")
    return make_place(pi)


def field_from_q(q: int):
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise UsageError(f"q={q} is not a prime power")
            return small_field(p, e)
    raise UsageError(f"q={q} is not a prime power")


# --- subcommands --------------------------------------------------------------

def cmd_build(args) -> int:
    F = field_from_q(args.q)
    zeta = parse_element(F, args.zeta)
    alpha = parse_element(F, args.alpha)
    alphas = [parse_element(F, a) for a in args.alphas]
    betas = [parse_element(F, b) for b in args.betas]
    inst = build_instance(F, args.n, zeta, alpha, alphas, betas, N=args.N)
    for name in ("D ≡ D0 mod t", "g0^x = D0(alpha)", "det x = 1",
                 f"reduction at (s-alpha) = (g0·g)^x mod t^{args.N}",
                 f"v_(s)(D_l) >= l for l < {args.N}"):
        log.info("%s: ok", name)
    mod = inst.module.to_json()
    mod["instance"] = inst.to_json()
    emit(mod, args.out)
    if args.instance_out:
        emit(inst.to_json(), args.instance_out)
    return EXIT_OK


def cmd_check(args) -> int:
    m, _ = load_module(args.module)
    place = parse_place(m.F, args.place)
    rep = check_existence_hypothesis(m, place, args.N)
    out = {"schema": REPORT_SCHEMA, "kind": "existence-hypothesis", "place": place.label(),
           "N": args.N, **rep.to_json()}
    emit(out, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    m, _ = load_module(args.module)
    place = parse_place(m.F, args.place)
    r = reduce_module_at(m, place, args.N)
    sol = solve_truncated(r, args.M_max, args.seed)
    ctx = sol.ctx
    ybar = sol.Ybar
    dbar = TruncSeriesMatrix(ctx, sol.embedding(r.Dbar.data))
    fundamental = not fundamental_residual(dbar, ybar).data.any()
    det_one = None
    try:
        ybar = normalize_to_sl(ybar)
        d = ybar.det().coeffs
        det_one = bool(d[0].tolist() == ctx.ones().tolist() and not d[1:].any())
    except DGWError:
        det_one = False
    out = {"schema": REPORT_SCHEMA, "kind": "truncated-solution", "place": place.label(),
           "N": args.N, "M": sol.M, "lang_M": sol.lang_M, "tried_M": sol.tried,
           "field_modulus": poly_str(Poly(small_field(ctx.p), ctx.modulus, "x")),
           "checks": {"fundamental": fundamental, "det_one": det_one,
                      "constant_term_invertible": ybar.is_invertible()}}
    if args.full:
        out["Ybar"] = ybar.data.tolist()
    emit(out, args.out)
    return EXIT_OK if fundamental else EXIT_INVARIANT


def cmd_extract(args) -> int:
    m, obj = load_module(args.module)
    threads = thread_count(args.threads)
    places = places_up_to(m.F, args.d_max)

    def one(pl):
        try:
            return extract_witness(m, pl, args.N, args.M_max, args.seed).to_json()
        except DGWError as exc:
            return {"place": pl.to_json(), "place_label": pl.label(),
                    "error": type(exc).__name__, "detail": str(exc)}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, places))
    else:
        results = [one(pl) for pl in places]
    ok = [r for r in results if "error" not in r]
    out = {"schema": REPORT_SCHEMA, "kind": "witness-set", "p": m.p, "e": m.e, "q": m.q, "n": m.n,
           "N": args.N, "d_max": args.d_max, "witnesses": ok,
           "errors": [r for r in results if "error" in r]}
    if "instance" in obj:
        out["instance"] = obj["instance"]
    emit(out, args.out)
    return EXIT_OK if ok else EXIT_NO_WITNESS


def _torus_charpoly_check(F, inst_obj, witnesses) -> dict | None:
    """Compare charpoly(h) at (s - alpha) with charpoly(g0·g) coefficientwise."""
    inst = SlInstance.from_json(inst_obj, N=2)
    label = inst.place_p.label()
    w = next((w for w in witnesses if w["place_label"] == label), None)
    if w is None:
        return None
    n, N, ctx = inst.n, int(w["N"]), F.ctx
    data = ctx.zeros((n, n, N))
    for i in range(n):
        for j in range(n):
            for l, c in enumerate(w["h"]["entries"][i][j]):
                data[i, j, l] = F.to_array(F.from_json(c))
    h = TruncSeriesMatrix(ctx, data)
    g = groups.torus_element(F, n, inst.zeta).series(ctx, N)
    g0 = TruncSeriesMatrix.constant(ctx, np.array([F.to_array(c) for c in inst.g0]).reshape(n, n, ctx.k), N)
    lhs = [c.coeffs.tolist() for c in series_charpoly(h)]
    rhs = [c.coeffs.tolist() for c in series_charpoly(g0 @ g)]
    return {"place": label, "matches": lhs == rhs}


def cmd_certify(args) -> int:
    obj = load_json(args.witnesses)
    try:
        F = small_field(int(obj["p"]), int(obj.get("e", 1)))
        n = int(obj["n"])
        wits = obj["witnesses"]
        h0s = [groups.mat(F, w["h0"]) for w in wits]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{args.witnesses}: not a witness set: {exc}") from None
    rep = groups.generation_report(F, n, h0s, [w["place_label"] for w in wits])
    out = {"schema": REPORT_SCHEMA, "kind": "generation-report", **rep.to_json(F)}
    if "instance" in obj and wits:
        out["torus_charpoly"] = _torus_charpoly_check(F, obj["instance"], wits)
    emit(out, args.out)
    if args.strict and rep.verdict != "full":
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_export_motive(args) -> int:
    m, _ = load_module(args.module)
    place = parse_place(m.F, args.place)
    phi, descriptor = export_pre_t_motive(m, place)
    out = {"schema": REPORT_SCHEMA, "kind": "pre-t-motive", "place": place.label(),
           "descriptor": descriptor, "Phi": phi.to_json()}
    emit(out, args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    F = field_from_q(args.q)
    zeta = parse_element(F, args.zeta) if args.zeta else None
    try:
        inst, rep = search_nori_parameters(F, args.n, args.budget, zeta,
                                           parse_element(F, args.alpha), args.d_max,
                                           thread_count(args.threads), args.M_max)
    except BudgetExhausted as exc:
        emit({"schema": REPORT_SCHEMA, "kind": "parameter-search", "verdict": "budget-exhausted",
              "detail": str(exc)}, args.out)
        return EXIT_CERTIFICATE
    emit({"schema": REPORT_SCHEMA, "kind": "parameter-search", "instance": inst.to_json(),
          "report": rep.to_json(F)}, args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _precision(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("precision must be >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dgw", description="Frobenius difference modules and their Galois witnesses")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, module=True, place=False):
        if module:
            p.add_argument("--module", required=True, help="module JSON file")
        if place:
            p.add_argument("--place", default="s", help="monic irreducible in s, e.g. 's+3'")
        p.add_argument("--out", default="-", help="output file (default stdout)")

    b = sub.add_parser("build", help="build the explicit SL_n module")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--zeta", required=True)
    b.add_argument("--alpha", required=True)
    b.add_argument("--alphas", nargs="+", required=True)
    b.add_argument("--betas", nargs="+", required=True)
    b.add_argument("--N", type=_precision, default=8)
    b.add_argument("--instance-out", default=None)
    common(b, module=False)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="check v(D_l) >= l at a place")
    c.add_argument("--N", type=_precision, default=8)
    common(c, place=True)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="truncated fundamental matrix at a place")
    s.add_argument("--N", type=_precision, default=8)
    s.add_argument("--M-max", dest="M_max", type=_positive, default=DEFAULT_M_MAX)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--full", action="store_true", help="include Ybar coefficients")
    common(s, place=True)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("extract", help="witnesses at all places up to a degree")
    e.add_argument("--d-max", dest="d_max", type=_positive, default=2)
    e.add_argument("--N", type=_precision, default=8)
    e.add_argument("--M-max", dest="M_max", type=_positive, default=DEFAULT_M_MAX)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--threads", type=_positive, default=1)
    common(e)
    e.set_defaults(func=cmd_extract)

    ce = sub.add_parser("certify", help="generation report from a witness set")
    ce.add_argument("--witnesses", required=True)
    ce.add_argument("--strict", action="store_true")
    common(ce, module=False)
    ce.set_defaults(func=cmd_certify)

    x = sub.add_parser("export-motive", help="rewrite the module in theta = 1/(s - alpha)")
    common(x, place=True)
    x.set_defaults(func=cmd_export_motive)

    se = sub.add_parser("search", help="search parameters that certify generation")
    se.add_argument("--q", type=int, required=True)
    se.add_argument("--n", type=int, default=2)
    se.add_argument("--zeta", default=None)
    se.add_argument("--alpha", default="2")
    se.add_argument("--budget", type=int, default=25)
    se.add_argument("--d-max", dest="d_max", type=_positive, default=3)
    se.add_argument("--M-max", dest="M_max", type=_positive, default=DEFAULT_M_MAX)
    se.add_argument("--threads", type=_positive, default=1)
    common(se, module=False)
    se.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"dgw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dgw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"dgw: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotIntegral, NonUnitDenominator, SingularReduction) as exc:
        print(f"dgw: integrality: {exc}", file=sys.stderr)
        return EXIT_INTEGRALITY
    except DegreeNotOne as exc:
        print(f"dgw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DGWError as exc:
        name = exc.name if isinstance(exc, InvariantViolated) else type(exc).__name__
        print(f"dgw: invariant failed: {name}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"dgw: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
