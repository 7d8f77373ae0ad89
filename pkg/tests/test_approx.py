import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf
from scipy.optimize import minimize_scalar

from kerrsqueeze.approx import s0, s1, s_prime, scaling_law
from kerrsqueeze.errors import KerrDomainError
from kerrsqueeze.table1 import matches_printed


def s0_literal(r, p=120):
    with mpmath.workdps(p):
        r = mpf(r)
        return 1 + 2 * r * r - 2 * r * mpmath.sqrt(1 + r * r)


def test_s0_values():
    assert s0(0) == 1
    with mpmath.workdps(50):
        assert abs(s0(1) - (3 - 2 * mpmath.sqrt(2))) < mpf("1e-48")
    v = s0(10)
    assert mpmath.nstr(v, 5) == "0.0024876"
    assert abs(v / mpf("0.0025") - 1) < mpf("0.005")


@pytest.mark.parametrize("r", ["0.01", "1", "37.5", "152.8", "1e4"])
def test_s0_matches_literal_formula(r):
    with mpmath.workdps(50):
        assert abs(s0(r) / s0_literal(r) - 1) < mpf("1e-45")


def test_s0_domain():
    with pytest.raises(KerrDomainError):
        s0(-1)


def test_s1_collapses_to_s0():
    for r in (0, 1, 5):
        assert s1(r, 0) == s0(r)
    for tau in ("1e-6", "0.1", "1"):
        assert s1(0, tau) == 1


def test_s1_domain():
    with pytest.raises(KerrDomainError):
        s1(-1, "0.1")
    with pytest.raises(KerrDomainError):
        s1(1, "-0.1")


def test_s1_minimum_close_to_exact_at_tau_1e_2():
    res = minimize_scalar(lambda r: float(s1(r, "1e-2", 30)), bounds=(0.1, 10), method="bounded",
                          options={"xatol": 1e-10})
    # Exact minimum 0.19636786 from the closed-form minimizer (see test_optimize).
    assert abs(res.fun / 0.19636786 - 1) < 0.10


def test_s_prime():
    assert s_prime(1, 0) == mpf("0.25")
    est = scaling_law("1e-6")
    assert mpmath.nstr(s_prime(est.r_prime_min, "1e-6"), 4) == "0.004482"
    with pytest.raises(KerrDomainError):
        s_prime(0, "1e-3")


@pytest.mark.parametrize("tau", ["1e-2", "1e-6", "1e-12"])
def test_s_prime_numeric_argmin(tau):
    est = scaling_law(tau)
    t = float(tau)
    rp = float(est.r_prime_min)
    res = minimize_scalar(lambda r: 1 / (4 * r * r) + 2 * r ** 3 * t, bounds=(rp / 10, rp * 10),
                          method="bounded", options={"xatol": 1e-12 * rp})
    assert abs(res.x / rp - 1) < 1e-6


@pytest.mark.parametrize("tau, s_text, r_text", [
    ("1e-1", "0.448", "0.964"),
    ("1e-2", "0.178", "1.528"),
    ("1e-3", "0.07103", "2.422"),
    ("1e-4", "0.02828", "3.839"),
    ("1e-6", "0.004482", "9.642"),
    ("1e-9", "0.0002828", "38.39"),
    ("1e-12", "1.784e-5", "152.8"),
])
def test_scaling_law_table(tau, s_text, r_text):
    est = scaling_law(tau)
    assert matches_printed(est.s_prime_min, s_text)
    assert matches_printed(est.r_prime_min, r_text)


@pytest.mark.parametrize("tau", ["1e-1", "1e-4", "1e-12", "3"])
def test_scaling_law_identities(tau):
    p = 50
    est = scaling_law(tau, p)
    with mpmath.workdps(p):
        t = mpf(tau)
        assert abs(est.s_prime_min / (mpf(5) / 12 * (12 * t) ** (mpf(2) / 5)) - 1) < mpf("1e-48")
        assert abs(est.r_prime_min / (12 * t) ** (-mpf(1) / 5) - 1) < mpf("1e-48")
        assert abs(est.s_prime_min * 12 * est.r_prime_min ** 2 / 5 - 1) < mpf("1e-48")
        assert abs(s_prime(est.r_prime_min, t, p) / est.s_prime_min - 1) < mpf("1e-48")


def test_scaling_law_domain():
    with pytest.raises(KerrDomainError):
        scaling_law(0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0, max_value=1e4), st.floats(min_value=0, max_value=1))
def test_s1_above_s0(r, tau):
    assert s1(r, tau, 30) >= s0(r, 30)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-8, max_value=0.1, exclude_max=True))
def test_s0_small_r(r):
    assert abs(s0(r, 30) - (1 - 2 * mpf(r))) < 3 * mpf(r) ** 2


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=10, max_value=1e6, exclude_min=True))
def test_s0_large_r(r):
    r = mpf(r)
    assert abs(s0(r, 30) * 4 * r * r - 1) < 1 / (r * r)


def test_s0_decreasing():
    rs = [mpf(k) / 10 for k in range(0, 400)]
    vals = [s0(r, 30) for r in rs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(0 < v <= 1 for v in vals)


@pytest.mark.parametrize("tau", ["1e-3", "1e-4", "1e-6", "1e-9", "1e-12"])
def test_s_prime_is_two_term_expansion_of_s1(tau):
    est = scaling_law(tau)
    a = s1(est.r_prime_min, tau)
    b = s_prime(est.r_prime_min, tau)
    assert abs(a - b) / b < mpf("0.10")
