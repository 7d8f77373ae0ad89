"""Brute-force Kerr state in a truncated Fock basis.

This is the independent check on the closed forms in :mod:`kerrsqueeze.kerr`:
coefficients come straight from the number-state expansion and moments from
ladder-operator sums, with no use of the analytic moment formulas.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Sequence

import mpmath
from mpmath import mpc, mpf

from .errors import KerrDomainError
from .kerr import MomentSet, SqueezeResult, principal_squeezing_from_moments
from .mpnum import Number, format_real, hp_exp, to_hp

MAX_ALPHA2 = mpf(10) ** 6
DEFAULT_EPS_TAIL = "1e-40"
DEFAULT_DIGITS = 50


@dataclass(frozen=True)
class FockState:
    """Coefficients c_0..c_{n_max} and a bound on the discarded probability."""

    coeffs: Sequence[mpc]
    n_max: int
    tail_bound: mpf
    alpha2: mpf
    digits: int


def poisson_pmf(lam: mpf, n: int, p: int) -> mpf:
    with mpmath.workdps(p):
        if lam == 0:
            return mpf(1) if n == 0 else mpf(0)
        if n < 0:
            return mpf(0)
        return mpmath.exp(-lam + n * mpmath.log(lam) - mpmath.loggamma(n + 1))


def poisson_tail_bound(lam: mpf, n_max: int, p: int) -> mpf:
    """Upper bound on sum_{n > n_max} Poisson(lam; n).

    Successive ratios lam/(n+1) are at most lam/(n_max+2) past the cut, so the
    tail is bounded by a geometric series; needs n_max + 2 > lam.
    """
    with mpmath.workdps(p):
        if lam == 0:
            return mpf(0)
        if n_max + 2 <= lam:
            return mpf(1)
        first = poisson_pmf(lam, n_max + 1, p)
        return first * (n_max + 2) / (n_max + 2 - lam)


def truncation_start(alpha2: mpf) -> int:
    return int(math.ceil(float(alpha2 + 12 * mpmath.sqrt(alpha2) + 20)))


def kerr_fock_state(alpha2: Number, alpha_phase: Number = 0, tau: Number = 0,
                    eps_tail: Number = DEFAULT_EPS_TAIL, p: int = DEFAULT_DIGITS) -> FockState:
    w = p + 5
    lam = to_hp(alpha2, w)
    eps = to_hp(eps_tail, w)
    if lam < 0:
        raise KerrDomainError(f"alpha2 must be >= 0, got {lam}")
    if lam > MAX_ALPHA2:
        raise KerrDomainError(f"Fock oracle is limited to alpha2 <= 1e6, got {mpmath.nstr(lam, 6)}")
    if eps <= 0:
        raise KerrDomainError("eps_tail must be > 0")
    n_max = truncation_start(lam)
    tail = poisson_tail_bound(lam, n_max, w)
    limit = 4 * n_max + 1000
    while tail >= eps:
        n_max += 1
        if n_max > limit:
            raise KerrDomainError(f"cannot reach tail bound {eps_tail} below n_max={limit}")
        tail = poisson_tail_bound(lam, n_max, w)

    tau = to_hp(tau, w)
    phase = to_hp(alpha_phase, w)
    with mpmath.workdps(w):
        alpha = mpmath.sqrt(lam) * hp_exp(mpc(0, phase), w)
        c = mpc(mpmath.exp(-lam / 2))
        coeffs = [c]
        for n in range(n_max):
            c = c * alpha / mpmath.sqrt(n + 1) * hp_exp(mpc(0, -tau * n), w)
            coeffs.append(c)
    with mpmath.workdps(p):
        coeffs = [+c for c in coeffs]
        return FockState(coeffs=tuple(coeffs), n_max=n_max, tail_bound=+tail,
                         alpha2=+lam, digits=p)


def _moment_bounds(state: FockState):
    """Absolute truncation bounds on <a>, <a^2>, <n>.

    Uses |c_n|^2 = Poisson(alpha2; n) exactly, so the neglected ladder sums
    collapse to Poisson tails rather than Cauchy-Schwarz square roots.
    """
    p = state.digits + 5
    lam = state.alpha2
    big_n = state.n_max
    with mpmath.workdps(p):
        tail = state.tail_bound
        pn = poisson_pmf(lam, big_n, p)
        pn1 = poisson_pmf(lam, big_n - 1, p)
        da = mpmath.sqrt(lam) * (pn + tail)
        da2 = lam * (pn1 + pn + tail)
        dn = lam * (pn + tail)
    return da, da2, dn


def fock_moments(state: FockState) -> MomentSet:
    """Ladder-operator sums over the stored coefficients."""
    p = state.digits
    c = state.coeffs
    with mpmath.workdps(p + 10):
        mean_a = mpc(0)
        mean_a2 = mpc(0)
        mean_n = mpf(0)
        for n in range(len(c)):
            mean_n += n * abs(c[n]) ** 2
            if n + 1 < len(c):
                mean_a += mpmath.sqrt(n + 1) * mpmath.conj(c[n]) * c[n + 1]
            if n + 2 < len(c):
                mean_a2 += mpmath.sqrt((n + 1) * (n + 2)) * mpmath.conj(c[n]) * c[n + 2]
        bound = max(_moment_bounds(state))
    with mpmath.workdps(p):
        return MomentSet(+mean_a, +mean_a2, +mean_n, digits=p, error_bound=+bound)


def squeezing_error_bound(state: FockState) -> mpf:
    """Absolute bound on |S_fock - S| propagated from the moment bounds."""
    da, da2, dn = _moment_bounds(state)
    with mpmath.workdps(state.digits + 5):
        amp = mpmath.sqrt(state.alpha2)
        d_abs2 = 2 * amp * da + da * da
        d_c = da2 + d_abs2
        return +(2 * dn + 2 * d_abs2 + 2 * d_c)


def principal_squeezing_fock(state: FockState) -> SqueezeResult:
    return principal_squeezing_from_moments(fock_moments(state))


def norm(state: FockState) -> mpf:
    with mpmath.workdps(state.digits + 10):
        total = mpmath.fsum(abs(c) ** 2 for c in state.coeffs)
    return total


def write_fock_csv(state: FockState, fh: IO[str], sig: int = 12) -> None:
    """Debug dump: one row of (n, Re c_n, Im c_n, |c_n|^2) per coefficient."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "re", "im", "prob"])
    with mpmath.workdps(state.digits):
        for n, c in enumerate(state.coeffs):
            writer.writerow([n, format_real(c.real, sig), format_real(c.imag, sig),
                             format_real(abs(c) ** 2, sig)])
