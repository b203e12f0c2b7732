"""Command-line front end.

Every subcommand prints one JSON document (or plain text with
``--format text``).  Exact rationals are written as "p/q" strings and
polynomials in canonical text form.  Exit status: 0 on success, 1 on a
domain error, 2 on a usage error (bad flags or malformed input).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import center, covariance, oracle, surface, ugln, verify
from ._parse import ParseError
from .exactalg import MultiPoly

SEED_ENV = "NCWALK_SEED"


class UsageError(ValueError):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return surface.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _enc(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (MultiPoly, ugln.NCElement, center.ShiftedSymPoly)):
        return str(v)
    if isinstance(v, dict):
        return {_key(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    return v


def _key(k) -> str:
    if isinstance(k, tuple):
        return "(" + ",".join(str(p) for p in k) + ")"
    return str(k)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _time(text: str) -> MultiPoly:
    """Exact rational or symbol; floats are rejected by the grammar."""
    return MultiPoly.parse(text)


def _scalar(p):
    if isinstance(p, MultiPoly) and p.is_constant():
        return p.constant_term()
    return p


def _element(args) -> ugln.NCElement:
    return ugln.parse_element(args.element, args.N)


def _levels_arg(text: str) -> dict:
    """``"2:1,0;1:0"`` -> {2: (1, 0), 1: (0,)}."""
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        lvl, _, lam = part.partition(":")
        out[int(lvl)] = _ints(lam)
    return out


def _initial(args) -> surface.InterlacedArray:
    if args.initial:
        levels = [_ints(p) for p in args.initial.split(";")]
        arr = surface.InterlacedArray(tuple(levels))
        if arr.N != args.levels:
            raise UsageError(f"--initial has {arr.N} levels but --levels is {args.levels}")
        return arr
    return surface.densely_packed(args.levels)


def _schedule(text: str, N: int):
    try:
        sched = surface.parse_schedule(text)
    except ValueError:
        raise UsageError(f"malformed --schedule {text!r}; expected \"(n,t);(n,t)...\"")
    return surface.validate_schedule(sched, N)


def _observables(text: str, schedule) -> list:
    parts = [p for p in text.split(";")]
    if len(parts) != len(schedule):
        raise UsageError("--obs needs one observable per schedule point")
    return [surface.parse_observable(p, n) for p, (n, _) in zip(parts, schedule)]


# -- subcommands -----------------------------------------------------------------


def cmd_state(args):
    x = ugln.parse_element(args.monomial, args.N)
    return {"element": str(x), "state": _scalar(ugln.state(x, _time(args.t)))}


def cmd_normal_form(args):
    return {"normal_form": str(ugln.normal_form(_element(args)))}


def cmd_apply_pt(args):
    y = ugln.apply_pt(_element(args), _time(args.t))
    return {"apply_pt": str(ugln.normal_form(y) if args.normal else y)}


def cmd_psi(args):
    x = center.psi(args.k, args.N) if args.sub is None else center.psi_sub(args.k, args.sub, args.N)
    return {"psi": str(x), "terms": len(x.terms)}


def cmd_hc(args):
    x = center.psi(args.psi, args.N) if args.psi else _element(args)
    return {"hc": str(center.harish_chandra(x).poly)}


def cmd_pt_expand(args):
    return {"k": args.k, "N": args.N, "expansion": center.pt_expand(args.k, args.N, _time(args.t))}


def cmd_eval(args):
    if args.psi:
        if args.N is None:
            raise UsageError("--psi needs --N")
        x = center.psi(args.psi, args.N)
    elif args.element:
        x = _element(args)
    else:
        raise UsageError("give --psi or --element")
    if args.t is not None:
        x = ugln.apply_pt(x, _time(args.t))
    if args.levels_at:
        return {"value": _scalar(center.evaluate_levels(x, _levels_arg(args.levels_at)))}
    if args.lam is None:
        raise UsageError("give --lambda or --levels-at")
    return {"value": _scalar(center.evaluate_at(x, _ints(args.lam)))}


def cmd_asymptotics(args):
    rho = _ints(args.rho) if args.rho else (args.k,)
    coeffs = center.asymptotic_coeffs_of(rho)
    return {"rho": list(rho), "coefficients": coeffs}


def cmd_simulate(args):
    ini = _initial(args)
    sched = _schedule(args.schedule, ini.N)
    obs = _observables(args.obs, sched)
    if args.replicas < 1:
        raise UsageError("--replicas must be >= 1")
    res = surface.mc_expectation(ini, sched, obs, args.replicas, args.seed)
    if args.csv:
        snaps = surface.simulate_batch(ini, sched, min(args.replicas, args.csv_rows), args.seed)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["replica", "point", "level", "time"] + [f"x{m}" for m in range(1, ini.N + 1)])
            for j, ((n, t), snap) in enumerate(zip(sched, snaps)):
                for r, row in enumerate(snap):
                    w.writerow([r, j, n, t] + list(row))
    return res.as_dict()


def cmd_cov(args):
    if args.verify_ckl:
        k = args.verify_ckl
        tau1, tau2, eta = Fraction(args.tau1), Fraction(args.tau2), Fraction(args.eta)
        return {"c_kl": covariance.solve_ckl(k, tau1, tau2, eta),
                "timelike_identity": covariance.verify_timelike_identity(k, tau1, tau2, eta)}
    if not (args.i and args.j):
        raise UsageError("give --i and --j as k,eta,tau (or --verify-ckl)")
    i, j = covariance.PathPoint.parse(args.i), covariance.PathPoint.parse(args.j)
    return {"branch": args.branch, "cov": covariance.cov(i, j, args.branch)}


def cmd_detform(args):
    v = oracle.detform_n2_exact(args.x, args.y, Fraction(args.t), args.k, args.bmax)
    return {"value": float(v), "exact": v}


def cmd_oracle_state(args):
    x = ugln.parse_element(args.monomial, args.N)
    t = _time(args.t)
    total = MultiPoly()
    for w, c in x.terms.items():
        total = total + c * oracle.state_diff_oracle(w, t, x.rank)
    return {"element": str(x), "state": _scalar(total)}


def cmd_ctmc(args):
    ini = _initial(args)
    sched = _schedule(args.schedule, ini.N)
    obs = _observables(args.obs, sched)
    return oracle.ctmc_expectation(ini, sched, obs, tol=args.tol).as_dict()


def cmd_verify(args):
    only = set(_ints(args.only)) if args.only else None
    results = verify.run_suite(args.suite, args.seed, only)
    if args.format == "text":
        for r in results:
            print(r.line(), file=sys.stderr)
    report = {"suite": args.suite, "passed": all(r.passed for r in results),
              "criteria": [r.as_dict() for r in results]}
    return report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncwalk", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    s = add("state", cmd_state, "state <x>_t of an element")
    s.add_argument("--monomial", required=True, help='element such as "E[2,1]E[1,2]"')
    s.add_argument("--t", default="t", help="time: rational or symbol")
    s.add_argument("--N", type=int, help="rank (default: largest index)")

    s = add("normal-form", cmd_normal_form, "PBW normal form")
    s.add_argument("--element", required=True)
    s.add_argument("--N", type=int)

    s = add("apply-pt", cmd_apply_pt, "apply the Markov operator P_t")
    s.add_argument("--element", required=True)
    s.add_argument("--t", default="t")
    s.add_argument("--N", type=int)
    s.add_argument("--normal", action="store_true", help="normal-order the result")

    s = add("psi", cmd_psi, "central element Psi_k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--sub", type=int, help="build Psi_k of gl_M inside gl_N")

    s = add("hc", cmd_hc, "Harish-Chandra image in shifted variables")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--element")
    g.add_argument("--psi", type=int)
    s.add_argument("--N", type=int)

    s = add("pt-expand", cmd_pt_expand, "P_t Psi_k in products of Psi's")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--t", default="t")

    s = add("eval", cmd_eval, "evaluate (P_t of) an element at a highest weight")
    s.add_argument("--psi", type=int)
    s.add_argument("--element")
    s.add_argument("--N", type=int)
    s.add_argument("--t", help="apply P_t first")
    s.add_argument("--lambda", dest="lam", help="highest weight, e.g. 4,2")
    s.add_argument("--levels-at", help='weights per level, e.g. "2:1,0;1:0"')

    s = add("asymptotics", cmd_asymptotics, "leading coefficients with N = eta L, t = tau L")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--rho", help="partition, e.g. 1,1")

    for name, fn, help_ in (("simulate", cmd_simulate, "Monte Carlo for the particle dynamics"),
                            ("ctmc", cmd_ctmc, "exact uniformized expectation for N <= 3")):
        s = add(name, fn, help_)
        s.add_argument("--levels", type=int, required=True, help="number of levels N")
        s.add_argument("--schedule", required=True, help='"(n,t);(n,t)..."')
        s.add_argument("--obs", required=True, help='one per point: "p1;p2" or polynomials in x1..xn')
        s.add_argument("--initial", help='positions per level, e.g. "0;1,-1" (default: densely packed)')
        if name == "simulate":
            s.add_argument("--replicas", type=int, default=100_000)
            s.add_argument("--seed", type=int, default=None)
            s.add_argument("--csv", help="write per-replica snapshots to this file")
            s.add_argument("--csv-rows", type=int, default=1000, help="replicas to dump")
        else:
            s.add_argument("--tol", type=float, default=1e-6)

    s = add("cov", cmd_cov, "limiting covariance of two observation points")
    s.add_argument("--i", help="k,eta,tau")
    s.add_argument("--j", help="k,eta,tau")
    s.add_argument("--branch", choices=("auto", "spacelike", "timelike"), default="auto")
    s.add_argument("--verify-ckl", type=int, metavar="K")
    s.add_argument("--tau1", default="1")
    s.add_argument("--tau2", default="2")
    s.add_argument("--eta", default="1")

    s = add("detform", cmd_detform,
            "N=2 determinantal formula; (x, y) enter as written, e.g. x=4, y=2 is the weight (4,2), positions (4,1)")
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--bmax", type=int, default=50)

    s = add("oracle-state", cmd_oracle_state, "state by explicit differentiation")
    s.add_argument("--monomial", required=True)
    s.add_argument("--t", default="t")
    s.add_argument("--N", type=int)

    s = add("verify", cmd_verify, "run the acceptance suite")
    s.add_argument("--suite", choices=tuple(verify.SUITES), default="quick")
    s.add_argument("--only", help="comma-separated criterion ids")
    s.add_argument("--seed", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = default_seed()
        out = args.func(args)
    except (UsageError, ParseError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(_enc(out), indent=2))
    else:
        for k, v in _enc(out).items():
            print(f"{k}: {v}")
    if args.command == "verify" and not out["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
