"""Command-line interface: ``kerrsqueeze {eval,min,table1,scan,fit,oracle-check}``.

Exit codes: 0 success, 2 domain/usage error, 3 precision failure, 4 oracle
mismatch.  Output is CSV (default) or JSON on stdout or ``--output``.
"""
from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from typing import List

import mpmath
from mpmath import mpf

from . import __version__, approx
from .errors import KerrDomainError, KerrError, OracleMismatch, PrecisionError
from .fock import MAX_ALPHA2, kerr_fock_state, principal_squeezing_fock, squeezing_error_bound
from .kerr import KerrPoint, working_digits, principal_squeezing_exact
from .mpnum import PrecisionPolicy, default_policy, required_digits, to_hp
from .optimize import (
    DEFAULT_REL_TOL,
    fit_power_law,
    fit_scaling_exponent,
    iter_scan,
    minimize_over_r,
    minimize_over_tau,
)
from .output import DEFAULT_SIG, encode_cell, write_csv, write_json
from .table1 import PRINTED, run_table1

EXIT_OK, EXIT_DOMAIN, EXIT_PRECISION, EXIT_ORACLE = 0, 2, 3, 4

DEFAULT_FIT_TAUS = "1e-4,1e-6,1e-9,1e-12"
DEFAULT_ORACLE_ALPHA2 = "1,4,16,100"
DEFAULT_ORACLE_TAUS = "0.01,0.1,0.5,1.0,3.0"


class UsageError(KerrDomainError):
    pass


def _number_list(text: str) -> List[str]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("empty list")
    for t in items:
        to_hp(t, 20)
    return items


def _policy(args) -> PrecisionPolicy:
    if args.precision is None:
        base = default_policy()
        return PrecisionPolicy(base.mode, base.digits, args.guard_digits)
    return PrecisionPolicy.parse(args.precision, args.guard_digits)


def _sig(args, digits: int) -> int:
    return digits if args.full_precision else DEFAULT_SIG


@contextmanager
def _open_output(args):
    if args.output in (None, "-"):
        yield sys.stdout
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(args, columns, rows, meta, sig):
    with _open_output(args) as fh:
        if args.format == "json":
            write_json(columns, rows, fh, meta=meta, sig=sig)
        else:
            write_csv(columns, rows, fh, sig=sig)


def _meta(args, **extra):
    meta = {"command": args.command, "version": __version__}
    meta.update(extra)
    return meta


# -- commands ---------------------------------------------------------------

def cmd_eval(args) -> int:
    policy = _policy(args)
    if (args.alpha2 is None) == (args.r is None):
        raise UsageError("give exactly one of --alpha2 or --r")
    point = KerrPoint(args.tau, alpha2=args.alpha2, r=args.r)
    p = working_digits(point, policy)
    v = point.at(p)
    row = {"tau": v.tau, "alpha2": v.alpha2, "r": v.r}
    columns = ["tau", "alpha2", "r"]
    which = args.which
    status = EXIT_OK

    def approx_value(fn, *a):
        try:
            return fn(*a, p)
        except KerrDomainError:
            if which != "all":
                raise
            return mpmath.nan

    if which in ("exact", "all"):
        res = principal_squeezing_exact(point, p, policy=policy,
                                        validate=True if args.validate else None,
                                        compensate=not args.no_compensate)
        row.update(S=res.s, theta_min=res.theta_min, digits=res.digits_used,
                   validated=res.validated)
        columns.append("S")
        if res.validated is False:
            status = EXIT_PRECISION
    if which in ("s0", "all"):
        row["S0"] = approx_value(approx.s0, v.r)
        columns.append("S0")
    if which in ("s1", "all"):
        row["S1"] = approx_value(approx.s1, v.r, v.tau)
        columns.append("S1")
    if which in ("sprime", "all"):
        row["Sprime"] = approx_value(approx.s_prime, v.r, v.tau)
        columns.append("Sprime")
    if "S" in row:
        columns += ["theta_min", "digits", "validated"]
    _emit(args, columns, [row], _meta(args, which=which, digits=p), _sig(args, p))
    return status


def cmd_min(args) -> int:
    policy = _policy(args)
    if (args.tau is None) == (args.alpha2 is None):
        raise UsageError("give exactly one of --tau (minimize over r) or --alpha2 (over tau)")
    if args.tau is not None:
        rec = minimize_over_r(args.tau, args.rel_tol, policy=policy)
        columns = ["tau", "r_min", "S_min", "alpha2_at_min", "r_prime_min", "S_prime_min",
                   "theta_min", "evaluations", "digits", "validated", "bracket_lo", "bracket_hi"]
        row = {"tau": rec.tau, "r_min": rec.r_min, "S_min": rec.s_min,
               "alpha2_at_min": rec.alpha2_at_min, "r_prime_min": rec.r_prime_min,
               "S_prime_min": rec.s_prime_min, "theta_min": rec.theta_min,
               "evaluations": rec.evaluations, "digits": rec.digits_used,
               "validated": rec.validated, "bracket_lo": rec.bracket[0],
               "bracket_hi": rec.bracket[1]}
        digits = rec.digits_used
    else:
        res = minimize_over_tau(args.alpha2, args.rel_tol, policy=policy)
        columns = ["alpha2", "tau_min", "S_min", "evaluations", "digits", "bracket_lo", "bracket_hi"]
        row = {"alpha2": res.alpha2, "tau_min": res.tau_min, "S_min": res.s_min,
               "evaluations": res.evaluations, "digits": res.digits_used,
               "bracket_lo": res.bracket[0], "bracket_hi": res.bracket[1]}
        digits = res.digits_used
    _emit(args, columns, [row], _meta(args, rel_tol=str(args.rel_tol)), _sig(args, digits))
    return EXIT_OK


TABLE1_COLUMNS = ["tau", "S_min", "S_prime_min", "r_min", "r_prime_min", "alpha2_at_min",
                  "digits", "validated", "flags"]


def cmd_table1(args) -> int:
    policy = _policy(args)
    rows = []
    errors = []
    nan = mpmath.nan
    for entry in run_table1(args.rel_tol, policy):
        rec = entry.record
        if rec is None:
            errors.append({"tau": entry.tau, "error": entry.error})
            rows.append({"tau": to_hp(entry.tau, 30), "S_min": nan, "S_prime_min": nan,
                         "r_min": nan, "r_prime_min": nan, "alpha2_at_min": nan,
                         "digits": 0, "validated": False, "flags": ";".join(entry.flags)})
            continue
        rows.append({"tau": rec.tau, "S_min": rec.s_min, "S_prime_min": rec.s_prime_min,
                     "r_min": rec.r_min, "r_prime_min": rec.r_prime_min,
                     "alpha2_at_min": rec.alpha2_at_min, "digits": rec.digits_used,
                     "validated": rec.validated, "flags": ";".join(entry.flags) or "ok"})
    printed = [dict(zip(["tau", "S_min", "S_prime_min", "r_min", "r_prime_min"], r))
               for r in PRINTED]
    digits = max(r["digits"] for r in rows)
    _emit(args, TABLE1_COLUMNS, rows, _meta(args, printed=printed, errors=errors),
          _sig(args, digits))
    flagged = [r for r in rows if r["flags"] != "ok"]
    if flagged:
        print(f"table1: {len(flagged)} row(s) deviate from the printed values", file=sys.stderr)
    return EXIT_OK


SCAN_COLUMNS = ["x", "S", "S0", "S1", "Sprime", "theta_min", "digits", "validated"]


def cmd_scan(args) -> int:
    policy = _policy(args)
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    if args.var == "tau":
        if args.alpha2 is None or args.tau is not None:
            raise UsageError("a tau scan takes --alpha2 and no --tau")
        smallest = abs(to_hp(args.lo, 30)) or mpf("1e-3")
    else:
        if args.tau is None or args.alpha2 is not None:
            raise UsageError("an r scan takes --tau and no --alpha2")
        smallest = abs(to_hp(args.tau, 30)) or mpf("1e-3")
    digits = required_digits(min(smallest, mpmath.pi), policy)
    errors = []

    def rows():
        for i, row in enumerate(iter_scan(args.var, args.lo, args.hi, args.points, tau=args.tau,
                                          alpha2=args.alpha2, spacing=args.spacing,
                                          policy=policy,
                                          validate=True if args.validate else None)):
            if row.error:
                errors.append({"index": i, "error": row.error})
            yield {"x": row.x, "S": row.s, "S0": row.s0, "S1": row.s1, "Sprime": row.s_prime,
                   "theta_min": row.theta_min, "digits": row.digits, "validated": row.validated}

    meta = _meta(args, var=args.var, spacing=args.spacing, points=args.points,
                 fixed={"tau": args.tau, "alpha2": args.alpha2}, errors=errors)
    _emit(args, SCAN_COLUMNS, rows(), meta, _sig(args, digits))
    for e in errors:
        print(f"scan: point {e['index']} failed: {e['error']}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    policy = _policy(args)
    taus = _number_list(args.taus)
    fit = fit_scaling_exponent(taus, rel_tol=args.rel_tol, policy=policy)
    recs = fit.records
    slope, icept, resid = fit_power_law([r.tau for r in recs], [r.alpha2_at_min for r in recs])
    row = {"gamma": fit.gamma, "intercept": fit.intercept, "residual": fit.residual,
           "alpha2_slope": slope, "alpha2_intercept": icept, "alpha2_residual": resid,
           "points": len(recs)}
    columns = list(row)
    sig = _sig(args, max(r.digits_used for r in recs))
    points = [{"tau": encode_cell(r.tau, sig), "r_min": encode_cell(r.r_min, sig),
               "S_min": encode_cell(r.s_min, sig), "alpha2_at_min": encode_cell(r.alpha2_at_min, sig)}
              for r in recs]
    _emit(args, columns, [row], _meta(args, points=points), sig)
    return EXIT_OK


ORACLE_COLUMNS = ["alpha2", "tau", "S_exact", "S_fock", "discrepancy", "bound", "n_max",
                  "tail_bound", "pass"]


def cmd_oracle_check(args) -> int:
    max_alpha2 = to_hp(args.max_alpha2, 30)
    if max_alpha2 > MAX_ALPHA2:
        raise UsageError("--max-alpha2 must be <= 1e6 (the Fock oracle is desk-scale only)")
    alphas = _number_list(args.alpha2)
    taus = _number_list(args.tau)
    for a in alphas:
        if to_hp(a, 30) > max_alpha2:
            raise UsageError(f"alpha2={a} exceeds --max-alpha2 {args.max_alpha2}")
    threshold = to_hp(args.threshold, 30)
    p = args.digits
    rows = []
    worst = mpf(0)
    for a in alphas:
        for t in taus:
            state = kerr_fock_state(a, 0, t, args.eps_tail, p)
            s_fock = principal_squeezing_fock(state).s
            s_exact = principal_squeezing_exact(KerrPoint(t, a), p, validate=False).s
            with mpmath.workdps(p):
                diff = abs(s_fock - s_exact)
            bound = squeezing_error_bound(state)
            ok = diff < max(threshold, bound)
            worst = max(worst, diff)
            rows.append({"alpha2": to_hp(a, p), "tau": to_hp(t, p), "S_exact": s_exact,
                         "S_fock": s_fock, "discrepancy": diff, "bound": bound,
                         "n_max": state.n_max, "tail_bound": state.tail_bound, "pass": ok})
    passed = all(r["pass"] for r in rows)
    meta = _meta(args, digits=p, threshold=str(args.threshold), worst=mpmath.nstr(worst, 6),
                 passed=passed)
    _emit(args, ORACLE_COLUMNS, rows, meta, _sig(args, p))
    verdict = "PASS" if passed else "FAIL"
    print(f"oracle-check: {verdict}, worst discrepancy {mpmath.nstr(worst, 6)}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_ORACLE


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", default=None,
                        help="'auto' or a decimal digit count (default: $KERRSQUEEZE_PRECISION or auto)")
    common.add_argument("--guard-digits", type=int, default=10)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
    common.add_argument("--full-precision", action="store_true",
                        help="print all working digits instead of 12 significant digits")

    parser = argparse.ArgumentParser(prog="kerrsqueeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate S and its approximations")
    p.add_argument("--tau", required=True)
    p.add_argument("--alpha2")
    p.add_argument("--r")
    p.add_argument("--which", choices=("exact", "s0", "s1", "sprime", "all"), default="all")
    p.add_argument("--validate", action="store_true", help="force the precision-doubling check")
    p.add_argument("--no-compensate", action="store_true",
                   help="single pass at the working digits, no cancellation compensation")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("min", parents=[common], help="locate a squeezing minimum")
    p.add_argument("--tau", help="minimize over r at this tau")
    p.add_argument("--alpha2", help="minimize over tau at this alpha2")
    p.add_argument("--rel-tol", default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_min)

    p = sub.add_parser("table1", parents=[common], help="recompute the noise-minimum table")
    p.add_argument("--rel-tol", default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("scan", parents=[common], help="tabulate S, S0, S1, S' along a grid")
    p.add_argument("--var", choices=("tau", "r"), required=True)
    p.add_argument("--lo", required=True)
    p.add_argument("--hi", required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--tau")
    p.add_argument("--alpha2")
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fit", parents=[common], help="fit the scaling exponent of S_min vs r_min")
    p.add_argument("--taus", default=DEFAULT_FIT_TAUS)
    p.add_argument("--rel-tol", default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare the Fock-space oracle with the closed form")
    p.add_argument("--max-alpha2", default="100")
    p.add_argument("--alpha2", default=DEFAULT_ORACLE_ALPHA2)
    p.add_argument("--tau", default=DEFAULT_ORACLE_TAUS)
    p.add_argument("--eps-tail", default="1e-40")
    p.add_argument("--threshold", default="1e-20")
    p.add_argument("--digits", type=int, default=50)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"kerrsqueeze: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except KerrDomainError as exc:
        print(f"kerrsqueeze: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PrecisionError as exc:
        print(f"kerrsqueeze: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except OracleMismatch as exc:
        print(f"kerrsqueeze: oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except KerrError as exc:
        print(f"kerrsqueeze: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # Reader went away (e.g. piped into head); suppress the flush-on-exit error.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
