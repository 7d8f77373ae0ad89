"""Short-time approximations of the principal squeezing in terms of r = alpha2*tau.

``s0`` is the tau -> 0 limit, ``s1`` adds the first-order correction in tau,
``s_prime`` keeps the two dominant large-r terms of ``s1`` and
``scaling_law`` is its closed-form minimum.  All of them run at arbitrary
precision so that comparisons with the exact formula only see model error.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import KerrDomainError
from .mpnum import Number, to_hp

DEFAULT_DIGITS = 50


@dataclass(frozen=True)
class ScalingEstimate:
    tau: mpf
    s_prime_min: mpf
    r_prime_min: mpf


def s0(r: Number, p: int = DEFAULT_DIGITS) -> mpf:
    """1 + 2r^2 - 2r sqrt(1+r^2), computed as 1/(r + sqrt(1+r^2))^2.

    The two forms are algebraically equal; the second has no cancellation at
    large r where the value falls like 1/(4r^2).
    """
    r = to_hp(r, p + 5)
    if r < 0:
        raise KerrDomainError(f"s0 needs r >= 0, got {r}")
    with mpmath.workdps(p + 5):
        value = 1 / (r + mpmath.sqrt(1 + r * r)) ** 2
    with mpmath.workdps(p):
        return +value


def s1(r: Number, tau: Number, p: int = DEFAULT_DIGITS) -> mpf:
    """s0(r) - r^3 tau + (3r^2 + 5) r^2 tau / sqrt(1 + r^2)."""
    r = to_hp(r, p + 5)
    tau = to_hp(tau, p + 5)
    if r < 0 or tau < 0:
        raise KerrDomainError(f"s1 needs r >= 0 and tau >= 0, got r={r}, tau={tau}")
    with mpmath.workdps(p + 10):
        root = mpmath.sqrt(1 + r * r)
        correction = r * r * tau * ((3 * r * r + 5) / root - r)
        value = s0(r, p + 10) + correction
    with mpmath.workdps(p):
        return +value


def s_prime(r: Number, tau: Number, p: int = DEFAULT_DIGITS) -> mpf:
    """1/(4r^2) + 2 r^3 tau; r = 0 is a pole and raises."""
    r = to_hp(r, p + 5)
    tau = to_hp(tau, p + 5)
    if r <= 0:
        raise KerrDomainError(f"s_prime needs r > 0, got {r}")
    if tau < 0:
        raise KerrDomainError(f"s_prime needs tau >= 0, got {tau}")
    with mpmath.workdps(p + 5):
        value = 1 / (4 * r * r) + 2 * r ** 3 * tau
    with mpmath.workdps(p):
        return +value


def scaling_law(tau: Number, p: int = DEFAULT_DIGITS) -> ScalingEstimate:
    """Minimum of ``s_prime`` over r: (5/12)(12 tau)^(2/5) at r = (12 tau)^(-1/5)."""
    tau = to_hp(tau, p + 5)
    if tau <= 0:
        raise KerrDomainError(f"scaling_law needs tau > 0, got {tau}")
    with mpmath.workdps(p + 5):
        x = 12 * tau
        s_min = mpf(5) / 12 * x ** (mpf(2) / 5)
        r_min = x ** (-mpf(1) / 5)
    with mpmath.workdps(p):
        return ScalingEstimate(+tau, +s_min, +r_min)
