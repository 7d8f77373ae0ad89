"""Closed-form field moments and principal squeezing of the Kerr state.

The input coherent amplitude is ``alpha = sqrt(alpha2) * exp(i*phase)`` and the
state is evolved by ``exp(-i tau n(n-1)/2)``.  Everything here is exact
algebra evaluated at arbitrary precision; the numerically delicate part is the
closed-form squeezing, where a handful of O(alpha2) terms cancel down to a
result that can be smaller than 1e-5.  :func:`principal_squeezing_exact`
measures that cancellation after a first pass and re-evaluates with enough
extra digits to cover it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath
from mpmath import mpc, mpf

from .errors import KerrDomainError, PrecisionError
from .mpnum import (
    Number,
    PrecisionPolicy,
    agreement_digits,
    default_policy,
    hp_cosm1,
    hp_exp,
    hp_expm1,
    reduce_angle,
    required_digits,
    to_hp,
)

# Validation by precision doubling is on by default below this |tau|.
VALIDATE_BELOW = mpf("1e-3")
_MAX_REFINEMENTS = 8


class PointValues(NamedTuple):
    tau: mpf
    alpha2: mpf
    r: mpf


@dataclass(frozen=True)
class KerrPoint:
    """A point in (tau, alpha2) parameter space.

    Give exactly one of ``alpha2`` (mean photon number) or ``r`` (the Kerr
    parameter ``alpha2 * tau``).  Values may be strings, so ``"1e-12"`` is
    converted exactly at whatever precision the evaluation uses.
    """

    tau: Number
    alpha2: Optional[Number] = None
    r: Optional[Number] = None

    def __post_init__(self):
        if (self.alpha2 is None) == (self.r is None):
            raise KerrDomainError("give exactly one of alpha2 or r")
        probe = self.at(30)
        if probe.alpha2 < 0:
            raise KerrDomainError(f"alpha2 must be >= 0, got {probe.alpha2}")

    @classmethod
    def from_r(cls, tau: Number, r: Number) -> "KerrPoint":
        return cls(tau=tau, r=r)

    def at(self, p: int) -> PointValues:
        """Values at ``p`` digits; ``r == alpha2 * tau`` at that precision."""
        tau = to_hp(self.tau, p)
        with mpmath.workdps(p):
            if self.alpha2 is not None:
                alpha2 = to_hp(self.alpha2, p)
                r = alpha2 * tau
            else:
                r = to_hp(self.r, p)
                if tau == 0:
                    if r != 0:
                        raise KerrDomainError("r != 0 needs tau != 0")
                    alpha2 = mpf(0)
                else:
                    alpha2 = r / tau
                    if alpha2 < 0:
                        raise KerrDomainError(f"alpha2 = r/tau must be >= 0, got {alpha2}")
        return PointValues(tau, alpha2, r)


@dataclass(frozen=True)
class MomentSet:
    """<a>, <a^2>, <n> together with the digits they were computed at.

    ``error_bound`` is an absolute bound on truncation error (nonzero only for
    moments obtained from a truncated Fock expansion).
    """

    mean_a: mpc
    mean_a2: mpc
    mean_n: mpf
    digits: int = 50
    error_bound: mpf = mpf(0)


@dataclass(frozen=True)
class SqueezeResult:
    """Principal squeezing and the homodyne phase that attains it.

    ``validated`` is True/False when the precision-doubling check ran and
    None when it was skipped; ``agreement`` is the number of matching digits.
    """

    s: mpf
    theta_min: mpf
    digits_used: int
    validated: Optional[bool] = None
    agreement: Optional[float] = None


def _theta_from_c(c: mpc, p: int) -> mpf:
    """Phase minimizing Var X_theta: (pi - arg C)/2 in [0, pi), 0 if C == 0."""
    with mpmath.workdps(p):
        if c == 0:
            return mpf(0)
        theta = (mpmath.pi - mpmath.arg(c)) / 2
        if theta >= mpmath.pi:
            theta -= mpmath.pi
        return +theta


def principal_squeezing_from_moments(m: MomentSet, p: int | None = None) -> SqueezeResult:
    """S = 1 + 2(<n> - |<a>|^2) - 2|<a^2> - <a>^2|, evaluated at ``m.digits``."""
    p = p or m.digits
    with mpmath.workdps(p):
        c = m.mean_a2 - m.mean_a ** 2
        s = 1 + 2 * (m.mean_n - abs(m.mean_a) ** 2) - 2 * abs(c)
        s = +s
    return SqueezeResult(s=s, theta_min=_theta_from_c(c, p), digits_used=p)


def quadrature_variance(m: MomentSet, theta: Number | mpf, p: int | None = None) -> mpf:
    """Var X_theta for X_theta = a e^{i theta} + a^dagger e^{-i theta}."""
    p = p or m.digits
    theta = to_hp(theta, p)
    with mpmath.workdps(p):
        c = m.mean_a2 - m.mean_a ** 2
        rot = hp_exp(mpc(0, 2 * theta), p)
        return +(1 + 2 * (m.mean_n - abs(m.mean_a) ** 2) + 2 * (c * rot).real)


def working_digits(point: KerrPoint, policy: PrecisionPolicy) -> int:
    """Digits the policy assigns to ``point`` (|tau| folded into [0, pi])."""
    tau = abs(reduce_angle(to_hp(point.tau, 40), 40))
    if tau == 0:
        return policy.digits if policy.mode == "fixed" else 50 + policy.guard_digits
    return required_digits(tau, policy)


def kerr_moments(point: KerrPoint, alpha_phase: Number = 0, p: int | None = None,
                 *, validate: bool = False) -> MomentSet:
    """Analytic moments of the Kerr state.

    <a> = alpha exp[alpha2 (e^{-i tau} - 1)],
    <a^2> = alpha^2 exp[alpha2 (e^{-2i tau} - 1) - i tau], <n> = alpha2,
    with every ``e^{-ik tau} - 1`` taken from :func:`hp_expm1`.
    """
    if p is None:
        p = working_digits(point, default_policy())
    m = _moments_at(point, alpha_phase, p)
    if validate:
        ref = _moments_at(point, alpha_phase, 2 * p)
        for name in ("mean_a", "mean_a2", "mean_n"):
            a, b = getattr(m, name), getattr(ref, name)
            if abs(b) > 0 and agreement_digits(a, b) < p - 4:
                raise PrecisionError(f"{name} fails precision doubling at {p} digits")
    return m


def _moments_at(point: KerrPoint, alpha_phase: Number, p: int) -> MomentSet:
    w = p + 5
    v = point.at(w)
    phase = to_hp(alpha_phase, w)
    tau = reduce_angle(v.tau, w)
    with mpmath.workdps(w):
        alpha = mpmath.sqrt(v.alpha2) * hp_exp(mpc(0, phase), w)
        e1 = hp_expm1(mpc(0, -tau), w)
        e2 = hp_expm1(mpc(0, -2 * tau), w)
        mean_a = alpha * hp_exp(v.alpha2 * e1, w)
        mean_a2 = alpha ** 2 * hp_exp(v.alpha2 * e2 - mpc(0, tau), w)
    with mpmath.workdps(p):
        return MomentSet(+mean_a, +mean_a2, +v.alpha2, digits=p)


def closed_form_terms(point: KerrPoint, dps: int) -> tuple[mpf, mpc, mpf]:
    """One literal pass of the closed form at ``dps`` digits.

    Returns ``(S, C, scale)`` where ``C = <a^2> - <a>^2`` for real alpha and
    ``scale`` is the largest magnitude among the terms that cancel in S.
    """
    v = point.at(dps)
    a2 = v.alpha2
    tau = reduce_angle(v.tau, dps)
    with mpmath.workdps(dps):
        cm1 = hp_cosm1(tau, dps)
        q = hp_expm1(2 * a2 * cm1, dps)
        e1 = hp_expm1(mpc(0, -tau), dps)
        e2 = hp_expm1(mpc(0, -2 * tau), dps)
        first = hp_exp(a2 * e2 - mpc(0, tau), dps)
        second = hp_exp(2 * a2 * e1, dps)
        d = first - second
        s = 1 - 2 * a2 * q - 2 * a2 * abs(d)
        scale = max(mpf(1), 2 * a2 * abs(q), 2 * a2 * max(abs(first), abs(second)))
        return +s, a2 * d, scale


def _evaluate(point: KerrPoint, p: int, compensate: bool) -> tuple[mpf, mpc, int]:
    dps = p
    for _ in range(_MAX_REFINEMENTS):
        s, c, scale = closed_form_terms(point, dps)
        if not compensate:
            break
        with mpmath.workdps(dps):
            lost = dps if s == 0 else max(0.0, float(mpmath.log10(scale / abs(s))))
        needed = p + math.ceil(lost) + 3
        if needed <= dps:
            break
        dps = needed
    with mpmath.workdps(p):
        return +s, +c, dps


def principal_squeezing_exact(point: KerrPoint, p: int | None = None, *,
                              policy: PrecisionPolicy | None = None,
                              validate: bool | None = None,
                              compensate: bool = True) -> SqueezeResult:
    """Closed-form principal squeezing S(tau, alpha2).

    ``p`` is the number of correct digits wanted (auto from ``policy`` when
    omitted).  With ``compensate`` the evaluation is repeated at ``p`` plus the
    number of digits the first pass lost to cancellation; ``digits_used``
    reports the precision of the final pass.  With ``compensate=False`` the
    formula is evaluated once at exactly ``p`` digits.

    When ``validate`` (default: on for |tau mod 2pi| < 1e-3) the value is
    recomputed at ``2p`` digits and must agree to ``p - guard_digits``
    significant figures.
    """
    policy = policy or default_policy()
    if p is None:
        p = working_digits(point, policy)
    if validate is None:
        validate = abs(reduce_angle(to_hp(point.tau, 40), 40)) < VALIDATE_BELOW
    s, c, used = _evaluate(point, p, compensate)
    validated = agreement = None
    if validate:
        ref, _, _ = _evaluate(point, 2 * p, True)
        agreement = agreement_digits(s, ref)
        validated = agreement >= p - policy.guard_digits
    return SqueezeResult(s=s, theta_min=_theta_from_c(c, p), digits_used=used,
                         validated=validated, agreement=agreement)
