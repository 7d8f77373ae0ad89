"""Arbitrary-precision real/complex helpers built on :mod:`mpmath`.

Values are plain ``mpmath.mpf`` / ``mpmath.mpc`` objects; precision is always
passed explicitly as a count of decimal digits and every function evaluates
inside ``mpmath.workdps`` so the caller's context is left untouched.

The cancellation-prone pieces of the Kerr formulas (``e^z - 1`` and
``cos x - 1`` for small arguments) are evaluated by their Taylor series, so a
leading term is never produced by subtracting two nearly equal numbers.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mpc, mpf

from .errors import HPOverflowError, KerrDomainError

HPReal = mpf
HPComplex = mpc
Number = Union[int, float, str, Fraction, mpf]

MIN_DIGITS = 16
PRECISION_ENV = "KERRSQUEEZE_PRECISION"

# e^x with x beyond this would need a binary exponent wider than 64 bits.
MAX_EXP_ARG = mpf(2) ** 63 * mpmath.log(2)

# Series branch boundary for hp_expm1 / hp_cosm1.
SERIES_RADIUS = 1


@dataclass(frozen=True)
class PrecisionPolicy:
    """How many decimal digits to work with.

    ``mode="auto"`` derives the digit count from the interaction time via
    :func:`required_digits`; ``mode="fixed"`` always uses ``digits``.
    """

    mode: str = "auto"
    digits: int = 50
    guard_digits: int = 10

    def __post_init__(self):
        if self.mode not in ("auto", "fixed"):
            raise KerrDomainError(f"unknown precision mode {self.mode!r}")
        if int(self.digits) != self.digits or self.digits < MIN_DIGITS:
            raise KerrDomainError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits}")
        if int(self.guard_digits) != self.guard_digits or self.guard_digits < 0:
            raise KerrDomainError(f"guard_digits must be a non-negative integer, got {self.guard_digits}")

    @classmethod
    def parse(cls, text: str, guard_digits: int = 10) -> "PrecisionPolicy":
        """Parse ``"auto"`` or an integer digit count."""
        text = str(text).strip().lower()
        if text == "auto":
            return cls("auto", 50, guard_digits)
        try:
            digits = int(text)
        except ValueError:
            raise KerrDomainError(f"precision must be 'auto' or an integer, got {text!r}") from None
        return cls("fixed", digits, guard_digits)


def default_policy() -> PrecisionPolicy:
    """Policy from ``$KERRSQUEEZE_PRECISION`` (``auto`` or digits), else auto."""
    value = os.environ.get(PRECISION_ENV)
    if value is None or not value.strip():
        return PrecisionPolicy()
    return PrecisionPolicy.parse(value)


def required_digits(tau, policy: PrecisionPolicy | None = None) -> int:
    """Working digits for interaction time ``tau``.

    Auto mode: ``max(50, 30 + ceil(3*log10(1/tau))) + guard``; fixed mode
    returns ``policy.digits`` unchanged.
    """
    policy = policy or PrecisionPolicy()
    tau = to_hp(tau, 30)
    if not tau > 0:
        raise KerrDomainError(f"required_digits needs tau > 0, got {tau}")
    if policy.mode == "fixed":
        return policy.digits
    with mpmath.workdps(30):
        # Nudge below the ceiling so tau = 10**-k maps to exactly 3k.
        loss = int(mpmath.ceil(3 * mpmath.log10(1 / tau) - mpf("1e-12")))
    return max(50, 30 + loss) + policy.guard_digits


def to_hp(x: Number, p: int) -> mpf:
    """Convert ``x`` to an ``mpf`` rounded to ``p`` digits.

    Strings and fractions are converted at ``p`` digits, so ``"1e-6"`` is the
    decimal value 10**-6 and not its nearest double.
    """
    with mpmath.workdps(p):
        if isinstance(x, mpf):
            return +x
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        if isinstance(x, (mpc, complex)):
            raise TypeError("expected a real number")
        return mpf(x)


def _check_precision(p: int) -> None:
    if p < MIN_DIGITS:
        raise KerrDomainError(f"precision must be >= {MIN_DIGITS} digits, got {p}")


def reduce_angle(x: mpf, p: int) -> mpf:
    """Return ``x`` reduced modulo 2*pi into (-pi, pi].

    The reduction runs with enough extra digits to absorb the integer part of
    ``x / 2pi``, so large arguments keep ``p`` significant digits.
    """
    if not mpmath.isfinite(x):
        raise KerrDomainError(f"angle must be finite, got {x}")
    if x == 0:
        return mpf(0)
    extra = max(0, int(mpmath.mag(x) * math.log10(2)) + 1) + 5
    with mpmath.workdps(p + extra):
        two_pi = 2 * mpmath.pi
        r = x - mpmath.nint(x / two_pi) * two_pi
        if r <= -mpmath.pi:
            r += two_pi
        elif r > mpmath.pi:
            r -= two_pi
    with mpmath.workdps(p):
        return +r


def _expm1_series(z, p: int):
    """Taylor sum of e^z - 1 for |z| < 1, truncated below 10**-(p+4)|z|."""
    with mpmath.workdps(p + 5):
        eps = abs(z) * mpf(10) ** (-(p + 4))
        term = z
        total = z
        k = 1
        while abs(term) > eps:
            k += 1
            term = term * z / k
            total += term
    return total


def _cosm1_series(x: mpf, p: int) -> mpf:
    """Taylor sum of cos x - 1 for |x| < 1; starts at -x**2/2."""
    with mpmath.workdps(p + 5):
        x2 = x * x
        term = -x2 / 2
        total = term
        eps = abs(term) * mpf(10) ** (-(p + 4))
        k = 1
        while abs(term) > eps:
            term = -term * x2 / ((2 * k + 1) * (2 * k + 2))
            total += term
            k += 1
    return total


def hp_cosm1(x: mpf, p: int) -> mpf:
    if not mpmath.isfinite(x):
        raise KerrDomainError(f"hp_cosm1 needs a finite argument, got {x}")
    _check_precision(p)
    x = reduce_angle(x, p + 5) if abs(x) >= SERIES_RADIUS else x
    if x == 0:
        return mpf(0)
    if abs(x) < SERIES_RADIUS:
        value = _cosm1_series(x, p)
    else:
        # |x| in [1, pi]: cos x - 1 <= cos(1) - 1 < -0.45, no cancellation.
        with mpmath.workdps(p + 5):
            value = mpmath.cos(x) - 1
    with mpmath.workdps(p):
        return +value


def _split(z):
    if isinstance(z, mpc):
        return z.real, z.imag, True
    if isinstance(z, complex):
        return mpf(z.real), mpf(z.imag), True
    return mpf(z), mpf(0), False


def _check_exponent(x: mpf) -> None:
    if not mpmath.isfinite(x):
        raise HPOverflowError(f"exponent is not finite: {x}")
    if x > MAX_EXP_ARG:
        raise HPOverflowError(f"exponent {mpmath.nstr(x, 8)} exceeds the supported range")


def hp_exp(z, p: int):
    """e^z to ``p`` digits; complex input yields mpc, real input mpf.

    The imaginary part is reduced modulo 2*pi at full precision before the
    trigonometric evaluation.
    """
    _check_precision(p)
    x, y, is_complex = _split(z)
    _check_exponent(x)
    if not mpmath.isfinite(y):
        raise KerrDomainError(f"imaginary part must be finite, got {y}")
    with mpmath.workdps(p + 5):
        scale = mpmath.exp(x)
        if not is_complex:
            with mpmath.workdps(p):
                return +scale
        y = reduce_angle(y, p + 5)
        value = mpc(scale * mpmath.cos(y), scale * mpmath.sin(y))
    with mpmath.workdps(p):
        return +value


def hp_expm1(z, p: int):
    """e^z - 1 to ``p`` digits, accurate for |z| << 1.

    For |z| >= 1 the real part is assembled as ``expm1(x)cos(y) + cosm1(y)``
    so that purely imaginary arguments near multiples of 2*pi stay accurate.
    """
    _check_precision(p)
    x, y, is_complex = _split(z)
    _check_exponent(x)
    if not mpmath.isfinite(y):
        raise KerrDomainError(f"imaginary part must be finite, got {y}")
    with mpmath.workdps(p + 5):
        zz = mpc(x, y) if is_complex else x
        if zz == 0:
            value = zz
        elif abs(zz) < SERIES_RADIUS:
            value = _expm1_series(zz, p)
        elif not is_complex:
            value = mpmath.exp(x) - 1
        else:
            yr = reduce_angle(y, p + 5)
            em1 = _expm1_series(x, p) if abs(x) < SERIES_RADIUS else mpmath.exp(x) - 1
            re = em1 * mpmath.cos(yr) + hp_cosm1(yr, p + 5)
            im = (em1 + 1) * mpmath.sin(yr)
            value = mpc(re, im)
    with mpmath.workdps(p):
        return +value


def agreement_digits(value, reference) -> float:
    """Number of significant decimal digits on which two values agree."""
    diff = abs(value - reference)
    if diff == 0:
        return math.inf
    scale = abs(reference)
    if scale == 0:
        return float(-mpmath.log10(diff))
    return float(-mpmath.log10(diff / scale))


# -- decimal serialization ---------------------------------------------------

def _to_decimal(x: mpf, sig: int) -> Decimal:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    num = (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)
    with localcontext() as ctx:
        ctx.prec = sig
        return Decimal(num.numerator) / Decimal(num.denominator)


def format_real(x, sig: int = 12) -> str:
    """Scientific notation with exactly ``sig`` significant digits.

    Output looks like ``-4.50095620000e-03``: one leading digit, a signed
    exponent of at least two digits.  The digits are correctly rounded.
    """
    if sig < 1:
        raise KerrDomainError("sig must be >= 1")
    x = mpf(x) if not isinstance(x, mpf) else x
    if mpmath.isnan(x):
        return "nan"
    if mpmath.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        mantissa, expo = "0." + "0" * (sig - 1) if sig > 1 else "0", 0
    else:
        text = f"{_to_decimal(x, sig):.{sig - 1}e}"
        mantissa, e = text.split("e")
        expo = int(e)
    if mantissa.endswith("."):
        mantissa = mantissa[:-1]
    sign = "-" if expo < 0 else "+"
    return f"{mantissa}e{sign}{abs(expo):02d}"


def parse_real(text: str, p: int) -> mpf:
    text = text.strip()
    if not text:
        raise KerrDomainError("empty number")
    with mpmath.workdps(p):
        try:
            return mpf(text)
        except (ValueError, TypeError):
            raise KerrDomainError(f"not a number: {text!r}") from None


def format_complex(z, sig: int = 12) -> str:
    z = mpc(z)
    return f"({format_real(z.real, sig)},{format_real(z.imag, sig)})"


def parse_complex(text: str, p: int) -> mpc:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")) or text.count(",") != 1:
        raise KerrDomainError(f"complex literal must look like (re,im): {text!r}")
    re, im = text[1:-1].split(",")
    return mpc(parse_real(re, p), parse_real(im, p))
