"""Command-line front end.

    pseudoregulus verify thm35 --q 2 --t 3 --n 2
    pseudoregulus construct pr --q 2 --t 3 --n 2 --sigma-exp 1
    pseudoregulus semifield gtf --q 3 --n 2 --t 2 --out g.txt
    pseudoregulus semifield recognize --input g.txt

Exit codes: 0 pass, 1 fail, 2 usage, 3 budget.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .field_tower import FieldError, gf_create
from .proj_geometry import (
    DEFAULT_ENUM_BUDGET,
    BudgetExceeded,
    FqLinearSet,
    GeometryError,
    ProjSpace,
    ProjSubspace,
    format_vector,
    is_scattered,
    parse_vector,
)
from .pseudoregulus import (
    DEFAULT_PAIR_BUDGET,
    LinePRSpec,
    NoMap,
    PseudoregulusError,
    PseudoregulusSpec,
    apply_semilinear,
    build_equivalence,
    build_line_pr,
    build_pr_linear_set,
    detect_line_pr,
    detect_pseudoregulus,
    pseudoregulus_of_spec,
    recover_sigma,
)
from .report import EXIT_BUDGET, EXIT_FAIL, EXIT_PASS, EXIT_USAGE, emit_report
from .segre import SegreError, build_segre, segre_checks
from .semifield import (
    GTFParams,
    KnuthParams,
    SemifieldError,
    format_spread_set,
    gtf_find_params,
    gtf_spread_set,
    knuth_find_params,
    knuth_spread_set,
    read_spread_set,
    recognize_gtf,
    recognize_knuth,
)
from .subgeometry import (
    SubgeometryError,
    canonical_subgeometry,
    construct_by_projection,
    default_director,
    recover_spread,
)
from .suites import SUITES, ConfigError, ScenarioConfig, parse_config_text, run_suite


class UsageError(Exception):
    pass


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            h = round(math.log(q, p))
            if p**h == q:
                return p, h
            break
    raise UsageError(f"q = {q} is not a prime power")


def _space_rows(S: ProjSubspace) -> list:
    return [format_vector(v) for v in S.basis]


def _emit(obj: dict, args) -> str:
    if args.format == "json":
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    else:
        text = "".join(f"{k}: {json.dumps(v, sort_keys=True)}\n" for k, v in sorted(obj.items()))
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


# -- verify --------------------------------------------------------------------------

def _config(args) -> ScenarioConfig:
    d = {}
    if args.config:
        d.update(parse_config_text(Path(args.config).read_text()))
    for k in ("q", "t", "n", "budget", "line_budget", "seed", "workers", "i1", "i2", "sigma_exp", "rho_exp"):
        v = getattr(args, k, None)
        if v is not None:
            d[k] = v
    if args.timing:
        d["timing"] = "1"
    return ScenarioConfig.from_mapping(d)


def cmd_verify(args) -> int:
    cfg = _config(args)
    rep = run_suite(args.suite, cfg)
    text = emit_report(rep, args.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    return rep.exit_code


# -- pseudoreguli ---------------------------------------------------------------------

def _pr_spec(args, sigma=None, rho=None) -> PseudoregulusSpec:
    p, h = _prime_power(args.q)
    F = gf_create(p, h * args.t)
    s = args.sigma_exp if sigma is None else sigma
    r = args.rho_exp if rho is None else rho
    return PseudoregulusSpec.standard(F, h, args.n, s, r)


def cmd_construct_pr(args) -> int:
    if args.n == 1:
        p, h = _prime_power(args.q)
        F = gf_create(p, h * args.t)
        L = build_line_pr(LinePRSpec.standard(F, h, args.sigma_exp, args.rho_exp))
        _emit({"q": args.q, "t": args.t, "n": 1, "size": L.size(), "scattered": is_scattered(L),
               "basis": [format_vector(v) for v in L.basis], "transversal_points": ["0:Z", "Z:0"]}, args)
        return EXIT_PASS
    spec = _pr_spec(args)
    L = build_pr_linear_set(spec, args.budget)
    P = pseudoregulus_of_spec(spec)
    _emit({
        "q": args.q, "t": args.t, "n": args.n, "size": L.size(), "scattered": is_scattered(L),
        "basis": [format_vector(v) for v in L.basis], "lines": [_space_rows(s) for s in P.lines],
        "line_count": P.m, "transversals": [_space_rows(P.T1), _space_rows(P.T2)],
        "sigma_class": recover_sigma(L, P) if args.n >= 2 else None,
    }, args)
    return EXIT_PASS


def _read_linear_set(args) -> FqLinearSet:
    """Basis vectors, one per line, over GF(q^t); '#' starts a comment."""
    p, h = _prime_power(args.q)
    F = gf_create(p, h * args.t)
    rows = [parse_vector(ln.split("#")[0]) for ln in Path(args.input).read_text().splitlines()
            if ln.split("#")[0].strip()]
    if not rows:
        raise UsageError("input holds no vectors")
    r = len(rows[0])
    if any(len(v) != r for v in rows):
        raise UsageError("vectors of different lengths")
    return FqLinearSet(ProjSpace.over(F, r), np.stack(rows), h)


def cmd_detect_pr(args) -> int:
    given = _read_linear_set(args) if args.input else None
    if given is not None:
        args.n = given.space.r // 2
        if given.space.r % 2:
            raise UsageError("need an even vector length")
    if args.n == 1:
        p, h = _prime_power(args.q)
        F = gf_create(p, h * args.t)
        L = given or build_line_pr(LinePRSpec.standard(F, h, args.sigma_exp, args.rho_exp))
        try:
            r = detect_line_pr(L, args.line_budget)
        except PseudoregulusError as exc:
            _emit({"kind": "not_pr", "reason": str(exc), "size": L.size()}, args)
            return EXIT_FAIL
        _emit({"kind": r.kind, "reason": r.reason,
               "pairs": [[format_vector(w), format_vector(v)] for w, v, _ in r.pairs]}, args)
        return EXIT_PASS if r.kind != "not_pr" else EXIT_FAIL
    L = given or build_pr_linear_set(_pr_spec(args), args.budget)
    if L.q ** L.rank > args.budget:
        raise BudgetExceeded("linear set too large to enumerate")
    try:
        r = detect_pseudoregulus(L, seed=args.seed)
    except PseudoregulusError as exc:
        _emit({"kind": "not_pr", "reason": str(exc), "size": L.size()}, args)
        return EXIT_FAIL
    out = {"kind": r.kind, "reason": r.reason, "size": L.size()}
    if r.is_pr:
        P = r.pseudoregulus
        out.update(line_count=P.m, transversals=[_space_rows(P.T1), _space_rows(P.T2)],
                   lines=[_space_rows(s) for s in P.lines])
        if args.n >= 2:
            out["sigma_class"] = recover_sigma(L, P)
    _emit(out, args)
    return EXIT_PASS if r.is_pr else EXIT_FAIL


def cmd_equiv_pr(args) -> int:
    a = _pr_spec(args)
    b = _pr_spec(args, args.sigma_exp2, args.rho_exp2)
    M = build_equivalence(a, b)
    if isinstance(M, NoMap):
        _emit({"equivalent": False, "reason": M.reason}, args)
        return EXIT_FAIL
    ok = apply_semilinear(M, build_pr_linear_set(a)).same_points(build_pr_linear_set(b))
    _emit({"equivalent": bool(ok), "matrix": [format_vector(r) for r in M.matrix], "frob_exp": M.frob_exp}, args)
    return EXIT_PASS if ok else EXIT_FAIL


# -- subgeometry -----------------------------------------------------------------------

def _projection(args):
    G = canonical_subgeometry(args.n, args.t, args.q)
    Th = default_director(G)
    return G, Th, construct_by_projection(Th, G, args.i1, args.i2)


def cmd_project(args) -> int:
    G, Th, R = _projection(args)
    L = R.linear_set
    _emit({"size": L.size(), "rank": L.rank, "s": R.s, "pseudoregulus_type": R.pr_type,
           "scattered": is_scattered(L), "basis": [format_vector(v) for v in L.basis],
           "center": _space_rows(R.spec.center) if R.spec.center.vdim else []}, args)
    return EXIT_PASS


def cmd_recover_spread(args) -> int:
    G, Th, R = _projection(args)
    if not R.pr_type:
        raise UsageError("recover-spread needs gcd(i2 - i1, t) = 1")
    r = detect_pseudoregulus(R.linear_set, seed=args.seed)
    if not r.is_pr:
        _emit({"recovered": False, "reason": r.reason}, args)
        return EXIT_FAIL
    rec = recover_spread(R.linear_set, R.spec, G, r.pseudoregulus)
    _emit({"recovered": True, "elements": [_space_rows(X) for X in rec.spread.elements],
           "size": len(rec.spread), "m": rec.m, "center_decomposition": rec.gamma_decomposition_ok,
           "desarguesian": bool(rec.directors_found), "director": _space_rows(rec.theta)}, args)
    return EXIT_PASS


# -- Segre variety and semifields -------------------------------------------------------

def cmd_segre_build(args) -> int:
    S = build_segre(args.n, args.q, args.budget)
    out = {k: (list(v) if isinstance(v, tuple) else v) for k, v in segre_checks(S).items()}
    _emit(out, args)
    return EXIT_PASS if S.constructions_agree else EXIT_FAIL


def _write_spread(C, args) -> int:
    text = format_spread_set(C)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_semifield_gtf(args) -> int:
    if args.c is None:
        ps = [P for P in gtf_find_params(args.q, args.n, args.t)
              if (args.l is None or P.l == args.l) and (args.m is None or P.m == args.m)]
        if not ps:
            raise UsageError("no admissible parameters")
        P = ps[0]
    else:
        if args.l is None or args.m is None:
            raise UsageError("--c needs --l and --m")
        P = GTFParams(args.q, args.n, args.t, args.c, args.l, args.m)
    return _write_spread(gtf_spread_set(P), args)


def cmd_semifield_knuth(args) -> int:
    if args.f is None or args.g is None:
        ps = knuth_find_params(args.q, args.t, args.family, args.sigma_exp, limit=1)
        if not ps:
            raise UsageError("no admissible parameters")
        P = ps[0]
    else:
        P = KnuthParams(args.q, args.t, args.family, args.sigma_exp, args.f, args.g)
    return _write_spread(knuth_spread_set(P), args)


def cmd_semifield_recognize(args) -> int:
    C = read_spread_set(args.input)
    results = []
    if args.family in ("gtf", "any"):
        results.append(recognize_gtf(C, seed=args.seed))
    if args.family in ("knuth", "any") and C.n == 2 and C.t >= 2:
        results.append(recognize_knuth(C, seed=args.seed))
    hit = next((r for r in results if r.ok), None)
    out = {"results": [{"kind": r.kind, "reason": r.reason,
                        "params": None if r.params is None else vars(r.params)} for r in results]}
    out["recognized"] = hit.kind if hit else None
    _emit(out, args)
    return EXIT_PASS if hit else EXIT_FAIL


# -- parser -----------------------------------------------------------------------------

def _common(p, scenario=True):
    if scenario:
        p.add_argument("--q", type=int)
        p.add_argument("--t", type=int)
        p.add_argument("--n", type=int)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--line-budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out")


def _pr_args(p, n_default=2):
    p.set_defaults(q=2, t=3, n=n_default)
    p.add_argument("--sigma-exp", type=int, default=1)
    p.add_argument("--rho-exp", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pseudoregulus", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    _common(v)
    v.add_argument("--workers", type=int)
    v.add_argument("--config", help="key=value file; flags override it")
    v.add_argument("--timing", action="store_true", help="record per-check runtimes")
    for k in ("--i1", "--i2", "--sigma-exp", "--rho-exp"):
        v.add_argument(k, type=int)
    v.set_defaults(func=cmd_verify, budget=None)

    helps = {"construct": "build the standard pseudoregulus-type set", "detect": "find the pseudoregulus of a set",
             "equiv": "map one standard set onto another"}
    for verb, func in (("construct", cmd_construct_pr), ("detect", cmd_detect_pr), ("equiv", cmd_equiv_pr)):
        p = sub.add_parser(verb, help=helps[verb]).add_subparsers(dest="what", required=True).add_parser("pr")
        _common(p)
        _pr_args(p)
        if verb == "detect":
            p.add_argument("--input", help="basis vectors of a linear set, one per line")
        if verb == "equiv":
            p.add_argument("--sigma-exp2", type=int, default=1)
            p.add_argument("--rho-exp2", type=int, default=0)
        p.set_defaults(func=func)

    helps = {"project": "project a subgeometry from director conjugates",
             "recover-spread": "rebuild the Desarguesian spread from a projection"}
    for verb, func in (("project", cmd_project), ("recover-spread", cmd_recover_spread)):
        p = sub.add_parser(verb, help=helps[verb])
        _common(p)
        p.set_defaults(q=2, t=3, n=2, func=func)
        p.add_argument("--i1", type=int, default=0)
        p.add_argument("--i2", type=int, default=1)

    sg = sub.add_parser("segre", help="Segre variety checks").add_subparsers(dest="what", required=True).add_parser("build")
    _common(sg)
    sg.set_defaults(q=3, n=2, func=cmd_segre_build)

    sf = sub.add_parser("semifield", help="twisted-field and Knuth spread sets").add_subparsers(dest="what", required=True)
    g = sf.add_parser("gtf")
    _common(g)
    g.set_defaults(q=3, n=2, t=2, func=cmd_semifield_gtf)
    for k in ("--c", "--l", "--m"):
        g.add_argument(k, type=int)
    k = sf.add_parser("knuth")
    _common(k)
    k.set_defaults(q=2, t=2, n=2, func=cmd_semifield_knuth)
    k.add_argument("--family", type=int, choices=[17, 19], default=17)
    k.add_argument("--sigma-exp", type=int, default=1)
    k.add_argument("--f", type=int)
    k.add_argument("--g", type=int)
    for parent in (sf, sub):
        r = parent.add_parser("recognize", help="recognize a spread-set file")
        _common(r, scenario=False)
        r.add_argument("--input", required=True)
        r.add_argument("--family", choices=["gtf", "knuth", "any"], default="any")
        r.set_defaults(func=cmd_semifield_recognize)
    return ap


_USAGE_ERRORS = (UsageError, ConfigError, FieldError, GeometryError, PseudoregulusError, SubgeometryError,
                 SegreError, SemifieldError, FileNotFoundError)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command != "verify":
        # verify leaves unset flags to the config file and the suite defaults
        for k, v in (("line_budget", DEFAULT_PAIR_BUDGET), ("budget", DEFAULT_ENUM_BUDGET), ("seed", 0)):
            if getattr(args, k, None) is None:
                setattr(args, k, v)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
