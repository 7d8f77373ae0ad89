"""Locating squeezing minima, fitting the power law, and parameter scans."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from . import approx
from .errors import BracketError, KerrDomainError, KerrError, PrecisionError
from .kerr import KerrPoint, principal_squeezing_exact
from .mpnum import Number, PrecisionPolicy, default_policy, required_digits, to_hp

log = logging.getLogger(__name__)

DEFAULT_REL_TOL = "1e-8"


@dataclass(frozen=True)
class MinimumRecord:
    tau: mpf
    r_min: mpf
    s_min: mpf
    alpha2_at_min: mpf
    r_prime_min: mpf
    s_prime_min: mpf
    evaluations: int
    digits_used: int
    bracket: Tuple[mpf, mpf]
    theta_min: mpf = mpf(0)
    validated: Optional[bool] = None


@dataclass(frozen=True)
class TauMinimum:
    alpha2: mpf
    tau_min: mpf
    s_min: mpf
    evaluations: int
    digits_used: int
    bracket: Tuple[mpf, mpf]


@dataclass(frozen=True)
class ScalingFit:
    gamma: mpf
    intercept: mpf
    residual: mpf
    points: List[Tuple[mpf, mpf]]
    records: List[MinimumRecord] = field(default_factory=list)


@dataclass
class GoldenResult:
    x: mpf
    fx: mpf
    evaluations: int
    bracket: Tuple[mpf, mpf]


def golden_section(f: Callable[[mpf], mpf], lo: mpf, hi: mpf, xtol: mpf, p: int,
                   max_widen: int = 1, widen: Callable | None = None) -> GoldenResult:
    """Minimize ``f`` on [lo, hi] by golden-section search down to width ``xtol``.

    Before contracting, one of the two interior probes must lie strictly below
    both endpoint values.  If not, ``widen(lo, hi)`` supplies a new bracket, at
    most ``max_widen`` times, after which :class:`BracketError` is raised.
    """
    with mpmath.workdps(p):
        inv_phi = (mpmath.sqrt(5) - 1) / 2
        evals = 0

        def g(x):
            nonlocal evals
            evals += 1
            return f(x)

        attempt = 0
        while True:
            f_lo, f_hi = g(lo), g(hi)
            x1 = hi - inv_phi * (hi - lo)
            x2 = lo + inv_phi * (hi - lo)
            f1, f2 = g(x1), g(x2)
            if min(f1, f2) < min(f_lo, f_hi):
                break
            if attempt >= max_widen or widen is None:
                raise BracketError(
                    f"no interior minimum in [{mpmath.nstr(lo, 6)}, {mpmath.nstr(hi, 6)}]")
            attempt += 1
            log.info("bracket [%s, %s] rejected, widening", mpmath.nstr(lo, 6), mpmath.nstr(hi, 6))
            lo, hi = widen(lo, hi)
        bracket = (lo, hi)
        while hi - lo > xtol:
            if f1 < f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - inv_phi * (hi - lo)
                f1 = g(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + inv_phi * (hi - lo)
                f2 = g(x2)
        x = (lo + hi) / 2
        return GoldenResult(x=x, fx=g(x), evaluations=evals, bracket=bracket)


def log_golden_section(f: Callable[[mpf], mpf], lo: mpf, hi: mpf, rel_tol: mpf, p: int,
                       cap: mpf | None = None) -> GoldenResult:
    """Golden section in log x for a positive bracket [lo, hi].

    Converges to relative width ``rel_tol`` in x.  A rejected bracket is
    widened once by a factor 10 on each side (never above ``cap``).
    """
    with mpmath.workdps(p):
        ten = mpmath.log(10)
        top = mpmath.log(cap) if cap is not None else None

        def widen(u_lo, u_hi):
            u_hi = u_hi + ten
            return u_lo - ten, (min(u_hi, top) if top is not None else u_hi)

        res = golden_section(lambda u: f(mpmath.exp(u)), mpmath.log(lo), mpmath.log(hi),
                             mpmath.log1p(rel_tol), p, widen=widen)
        x = mpmath.exp(res.x)
        if cap is not None and res.bracket[1] == top:
            upper = cap
        else:
            upper = mpmath.exp(res.bracket[1])
        return GoldenResult(x=x, fx=res.fx, evaluations=res.evaluations,
                            bracket=(mpmath.exp(res.bracket[0]), upper))


def _resolve_digits(tau: mpf, p: int | None, policy: PrecisionPolicy) -> int:
    return p if p is not None else required_digits(tau, policy)


def minimize_over_r(tau: Number, rel_tol: Number = DEFAULT_REL_TOL, p: int | None = None,
                    *, policy: PrecisionPolicy | None = None) -> MinimumRecord:
    """Minimum of S over the Kerr parameter r at fixed tau.

    The initial bracket is [r'/10, 10 r'] around the scaling-law optimum r';
    it is widened tenfold once if it fails the interior-minimum check.
    """
    policy = policy or default_policy()
    tau_v = to_hp(tau, 40)
    if not (0 < tau_v <= mpf("0.1") + mpf("1e-30")):
        raise KerrDomainError(f"minimize_over_r needs 0 < tau <= 0.1, got {tau_v}")
    tol = to_hp(rel_tol, 30)
    if not (mpf("1e-12") <= tol <= mpf("1e-3")):
        raise KerrDomainError(f"rel_tol must lie in [1e-12, 1e-3], got {tol}")
    p = _resolve_digits(tau_v, p, policy)
    tau_p = to_hp(tau, p)
    est = approx.scaling_law(tau_p, p)

    def f(r):
        return principal_squeezing_exact(KerrPoint.from_r(tau_p, r), p, policy=policy,
                                         validate=False).s

    with mpmath.workdps(p):
        lo, hi = est.r_prime_min / 10, est.r_prime_min * 10
    res = log_golden_section(f, lo, hi, to_hp(rel_tol, p), p)
    final = principal_squeezing_exact(KerrPoint.from_r(tau_p, res.x), p, policy=policy)
    if final.validated is False:
        raise PrecisionError(f"minimum at tau={mpmath.nstr(tau_p, 6)} failed precision doubling")
    with mpmath.workdps(p):
        alpha2 = res.x / tau_p
    return MinimumRecord(tau=tau_p, r_min=res.x, s_min=final.s, alpha2_at_min=alpha2,
                         r_prime_min=est.r_prime_min, s_prime_min=est.s_prime_min,
                         evaluations=res.evaluations + 1, digits_used=final.digits_used,
                         bracket=res.bracket, theta_min=final.theta_min,
                         validated=final.validated)


def tau_guess(alpha2: mpf, p: int) -> mpf:
    """Interaction time at which alpha2 * tau equals the scaling-law r'(tau)."""
    with mpmath.workdps(p):
        return (mpf(12) ** (-mpf(1) / 5) / alpha2) ** (mpf(5) / 6)


def minimize_over_tau(alpha2: Number, rel_tol: Number = DEFAULT_REL_TOL, p: int | None = None,
                      *, policy: PrecisionPolicy | None = None) -> TauMinimum:
    """Minimum of S over tau in (0, pi/4] at fixed mean photon number."""
    policy = policy or default_policy()
    a2 = to_hp(alpha2, 40)
    if not a2 > 0:
        raise KerrDomainError(f"minimize_over_tau needs alpha2 > 0, got {a2}")
    def initial_bracket(q):
        with mpmath.workdps(q):
            top = mpmath.pi / 4
            t0 = tau_guess(to_hp(alpha2, q), q)
            if t0 > top:
                t0 = top / 2
            return t0 / 10, min(t0 * 10, top)

    # Digits for the smallest tau the search can reach after widening.
    p = _resolve_digits(initial_bracket(40)[0] / 10, p, policy)
    a2_p = to_hp(alpha2, p)
    lo, hi = initial_bracket(p)

    def f(tau):
        return principal_squeezing_exact(KerrPoint(tau, a2_p), p, policy=policy,
                                         validate=False).s

    with mpmath.workdps(p):
        top = mpmath.pi / 4
    res = log_golden_section(f, lo, hi, to_hp(rel_tol, p), p, cap=top)
    return TauMinimum(alpha2=a2_p, tau_min=res.x, s_min=res.fx, evaluations=res.evaluations,
                      digits_used=p, bracket=res.bracket)


def fit_power_law(xs: Sequence, ys: Sequence, p: int = 50) -> Tuple[mpf, mpf, mpf]:
    """Unweighted least squares of log y = slope * log x + intercept.

    Returns ``(slope, intercept, max |residual|)`` in natural-log units.
    """
    if len(xs) != len(ys):
        raise KerrDomainError("xs and ys differ in length")
    if len(xs) < 2:
        raise KerrDomainError("a power-law fit needs at least two points")
    with mpmath.workdps(p):
        lx = [mpmath.log(to_hp(x, p)) for x in xs]
        ly = [mpmath.log(to_hp(y, p)) for y in ys]
        n = len(lx)
        mx = mpmath.fsum(lx) / n
        my = mpmath.fsum(ly) / n
        sxx = mpmath.fsum((a - mx) ** 2 for a in lx)
        if sxx == 0:
            raise KerrDomainError("degenerate fit: all abscissae equal")
        sxy = mpmath.fsum((a - mx) * (b - my) for a, b in zip(lx, ly))
        slope = sxy / sxx
        intercept = my - slope * mx
        residual = max(abs(b - (slope * a + intercept)) for a, b in zip(lx, ly))
    return slope, intercept, residual


def fit_scaling_exponent(taus: Sequence[Number], p: int | None = None,
                         rel_tol: Number = DEFAULT_REL_TOL, *,
                         policy: PrecisionPolicy | None = None) -> ScalingFit:
    """Fit S_min ~ r_min**gamma over minima found at each tau (all <= 1e-3)."""
    if len(taus) < 2:
        raise KerrDomainError("need at least two interaction times")
    for t in taus:
        if not 0 < to_hp(t, 30) <= mpf("1e-3") * (1 + mpf("1e-20")):
            raise KerrDomainError(f"fit taus must lie in (0, 1e-3], got {t}")
    records = [minimize_over_r(t, rel_tol, p, policy=policy) for t in taus]
    points = [(rec.r_min, rec.s_min) for rec in records]
    gamma, intercept, residual = fit_power_law([a for a, _ in points], [b for _, b in points])
    return ScalingFit(gamma=gamma, intercept=intercept, residual=residual, points=points,
                      records=records)


# -- scans ------------------------------------------------------------------

@dataclass
class ScanRow:
    x: mpf
    s: mpf
    s0: mpf
    s1: mpf
    s_prime: mpf
    theta_min: mpf
    digits: int
    validated: Optional[bool]
    error: Optional[str] = None


def grid(lo: Number, hi: Number, points: int, spacing: str = "log", p: int = 50) -> List[mpf]:
    if points < 2:
        raise KerrDomainError("a scan needs at least two points")
    if spacing not in ("log", "linear"):
        raise KerrDomainError(f"spacing must be 'log' or 'linear', got {spacing!r}")
    lo_v, hi_v = to_hp(lo, p), to_hp(hi, p)
    if not lo_v < hi_v:
        raise KerrDomainError("scan needs lo < hi")
    if spacing == "log" and lo_v <= 0:
        raise KerrDomainError("log spacing needs lo > 0")
    with mpmath.workdps(p):
        n = points - 1
        if spacing == "log":
            ratio = hi_v / lo_v
            xs = [lo_v * ratio ** (mpf(i) / n) for i in range(points)]
        else:
            xs = [lo_v + (hi_v - lo_v) * i / n for i in range(points)]
    xs[0], xs[-1] = lo_v, hi_v
    return xs


def _approx_or_nan(fn, *args):
    try:
        return fn(*args)
    except KerrDomainError:
        return mpmath.nan


def scan(variable: str, lo: Number, hi: Number, points: int, **kwargs) -> List[ScanRow]:
    """List form of :func:`iter_scan`."""
    return list(iter_scan(variable, lo, hi, points, **kwargs))


def iter_scan(variable: str, lo: Number, hi: Number, points: int, *, tau: Number | None = None,
              alpha2: Number | None = None, spacing: str = "log", p: int | None = None,
              policy: PrecisionPolicy | None = None, validate: bool | None = None):
    """Tabulate S and its approximations along tau (fixed alpha2) or r (fixed tau).

    Approximations that are undefined at a point are filled with NaN; a point
    whose exact evaluation fails keeps its row with NaN values and the error
    message, and the scan carries on.
    """
    policy = policy or default_policy()
    if variable == "tau":
        if alpha2 is None:
            raise KerrDomainError("a tau scan needs a fixed alpha2")
    elif variable == "r":
        if tau is None:
            raise KerrDomainError("an r scan needs a fixed tau")
    else:
        raise KerrDomainError(f"scan variable must be 'tau' or 'r', got {variable!r}")
    xs = grid(lo, hi, points, spacing, p or 50)
    for x in xs:
        try:
            point = KerrPoint(x, alpha2) if variable == "tau" else KerrPoint.from_r(tau, x)
            res = principal_squeezing_exact(point, p, policy=policy, validate=validate)
        except KerrError as exc:
            nan = mpmath.nan
            yield ScanRow(x, nan, nan, nan, nan, nan, 0, False, str(exc))
            continue
        v = point.at(res.digits_used)
        ap = max(50, p or 50)
        yield ScanRow(
            x=x, s=res.s,
            s0=_approx_or_nan(approx.s0, v.r, ap),
            s1=_approx_or_nan(approx.s1, v.r, v.tau, ap),
            s_prime=_approx_or_nan(approx.s_prime, v.r, v.tau, ap),
            theta_min=res.theta_min, digits=res.digits_used, validated=res.validated,
        )
