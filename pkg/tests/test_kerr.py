import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpc, mpf

from kerrsqueeze.errors import KerrDomainError
from kerrsqueeze.fock import fock_moments, kerr_fock_state
from kerrsqueeze.kerr import (
    KerrPoint,
    MomentSet,
    kerr_moments,
    principal_squeezing_exact,
    principal_squeezing_from_moments,
    quadrature_variance,
)


def close(a, b, tol):
    with mpmath.workdps(60):
        return abs(a - b) <= mpf(tol)


def test_point_r_is_product():
    v = KerrPoint("1e-3", "2500").at(60)
    with mpmath.workdps(60):
        assert v.r == v.alpha2 * v.tau
    w = KerrPoint.from_r("1e-6", "9.609").at(60)
    with mpmath.workdps(60):
        assert abs(w.alpha2 * w.tau - w.r) <= abs(w.r) * mpf(10) ** -58


def test_point_validation():
    with pytest.raises(KerrDomainError):
        KerrPoint("0.1")
    with pytest.raises(KerrDomainError):
        KerrPoint("0.1", alpha2=1, r=1)
    with pytest.raises(KerrDomainError):
        KerrPoint("0.1", alpha2=-1)
    with pytest.raises(KerrDomainError):
        KerrPoint.from_r(0, 1)


def test_vacuum_moments():
    m = kerr_moments(KerrPoint("0.3", 0), 0, 50)
    assert m.mean_a == 0 and m.mean_a2 == 0 and m.mean_n == 0


def test_coherent_moments():
    m = kerr_moments(KerrPoint(0, 4), 0, 50)
    assert m.mean_a == 2 and m.mean_a2 == 4 and m.mean_n == 4


def test_moments_match_fock_oracle():
    m = kerr_moments(KerrPoint("0.1", 4), 0, 50)
    f = fock_moments(kerr_fock_state(4, 0, "0.1", "1e-40", 50))
    for a, b in ((m.mean_a, f.mean_a), (m.mean_a2, f.mean_a2), (m.mean_n, f.mean_n)):
        assert close(a, b, "1e-25")


def test_moments_validate_flag():
    m = kerr_moments(KerrPoint("1e-5", "1e6"), 0, 40, validate=True)
    assert m.digits == 40


def test_cauchy_schwarz():
    for tau in ("0.01", "0.7", "2.5"):
        m = kerr_moments(KerrPoint(tau, 9), 0, 50)
        assert m.mean_n >= abs(m.mean_a) ** 2


def test_from_moments_coherent_and_vacuum():
    res = principal_squeezing_from_moments(kerr_moments(KerrPoint(0, 4), 0, 50))
    assert res.s == 1 and res.theta_min == 0
    vac = principal_squeezing_from_moments(MomentSet(mpc(0), mpc(0), mpf(0)))
    assert vac.s == 1


def test_from_moments_matches_closed_form():
    p = 50
    pt = KerrPoint("0.1", 4)
    exact = principal_squeezing_exact(pt, p)
    via_m = principal_squeezing_from_moments(kerr_moments(pt, 0, exact.digits_used))
    with mpmath.workdps(p):
        assert abs(exact.s - via_m.s) <= abs(exact.s) * mpf(10) ** (-p + 6)
        assert abs(exact.theta_min - via_m.theta_min) < mpf(10) ** (-p + 6)


def test_variance_vacuum_and_period():
    vac = MomentSet(mpc(0), mpc(0), mpf(0))
    for th in ("0", "0.4", "2.9"):
        assert quadrature_variance(vac, th) == 1
    m = kerr_moments(KerrPoint("0.3", 5), 0, 50)
    with mpmath.workdps(50):
        for th in (mpf("0.1"), mpf("1.3")):
            assert close(quadrature_variance(m, th), quadrature_variance(m, th + mpmath.pi), "1e-45")


def test_variance_grid_oracle():
    m = kerr_moments(KerrPoint("0.1", 4), 0, 50)
    s = principal_squeezing_from_moments(m).s
    with mpmath.workdps(50):
        grid = [quadrature_variance(m, mpmath.pi * k / 64) for k in range(64)]
    best = min(grid)
    assert best >= s - mpf("1e-40")
    assert best - s < mpf("1e-3")


def test_exact_tau_zero_is_vacuum_level():
    for a2 in (0, 1, "1e8"):
        assert principal_squeezing_exact(KerrPoint(0, a2), 50).s == 1


def test_exact_alpha2_zero():
    assert principal_squeezing_exact(KerrPoint("0.7", 0), 50).s == 1


def test_exact_table_point():
    res = principal_squeezing_exact(KerrPoint.from_r("1e-6", "9.609"))
    assert mpmath.nstr(res.s, 4) == "0.004501"
    assert res.validated is True


def test_uncompensated_low_precision_fails_validation():
    res = principal_squeezing_exact(KerrPoint.from_r("1e-12", "152.8"), 16, compensate=False,
                                    validate=True)
    assert res.validated is False


def test_validation_default_threshold():
    assert principal_squeezing_exact(KerrPoint("0.5", 3)).validated is None
    assert principal_squeezing_exact(KerrPoint("1e-4", 3)).validated is True
    assert principal_squeezing_exact(KerrPoint("0.5", 3), validate=True).validated is True


# -- properties -------------------------------------------------------------

taus = st.floats(min_value=1e-6, max_value=3.14159, allow_nan=False)
alphas = st.floats(min_value=0, max_value=1e4, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(taus, alphas)
def test_identity_closed_form_vs_moments(tau, a2):
    pt = KerrPoint(tau, a2)
    exact = principal_squeezing_exact(pt, 40)
    via_m = principal_squeezing_from_moments(kerr_moments(pt, 0, exact.digits_used)).s
    with mpmath.workdps(exact.digits_used):
        assert abs(exact.s - via_m) <= abs(exact.s) * mpf(10) ** -34


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-3.1, max_value=3.1), st.floats(min_value=0, max_value=500))
def test_periodic_and_even(tau, a2):
    p = 40
    base = principal_squeezing_exact(KerrPoint(tau, a2), p).s
    with mpmath.workdps(p + 20):
        shifted = mpf(tau) + 2 * mpmath.pi
    for other in (principal_squeezing_exact(KerrPoint(-tau, a2), p).s,
                  principal_squeezing_exact(KerrPoint(shifted, a2), p).s):
        with mpmath.workdps(p):
            assert abs(other - base) <= abs(base) * mpf(10) ** (-p + 6)


@settings(max_examples=30, deadline=None)
@given(taus, alphas)
def test_bounds(tau, a2):
    s = principal_squeezing_exact(KerrPoint(tau, a2), 40).s
    assert 0 < s <= 1 + 2 * mpf(a2) + mpf("1e-30")


@pytest.mark.parametrize("tau, a2", [("0.1", 4), ("1e-3", 500), ("0.8", 30), ("2.2", 2)])
def test_phase_optimality(tau, a2):
    p = 50
    m = kerr_moments(KerrPoint(tau, a2), 0, p)
    res = principal_squeezing_from_moments(m)
    assert close(quadrature_variance(m, res.theta_min), res.s, mpf(10) ** (-p + 6) * (1 + a2))
    rng = random.Random(1234)
    for _ in range(256):
        th = mpf(rng.uniform(0, 6.3))
        assert quadrature_variance(m, th) >= res.s - mpf(10) ** (-p + 6)


def test_theta_range():
    for tau in ("0.01", "0.5", "1.5", "3.0"):
        th = principal_squeezing_exact(KerrPoint(tau, 7), 40).theta_min
        assert 0 <= th < mpmath.pi


def test_returns_to_vacuum_near_pi():
    with mpmath.workdps(60):
        tau = mpmath.pi - mpf("1e-8")
    s = principal_squeezing_exact(KerrPoint(tau, 4), 50).s
    assert abs(s - 1) < mpf("1e-2")


def test_moment_rotation():
    p = 50
    pt = KerrPoint("0.4", 6)
    m0 = kerr_moments(pt, 0, p)
    phi = mpf("0.7")
    m1 = kerr_moments(pt, phi, p)
    with mpmath.workdps(p):
        rot = mpmath.exp(mpc(0, phi))
        assert abs(m1.mean_a - rot * m0.mean_a) < mpf("1e-45")
        assert abs(m1.mean_a2 - rot ** 2 * m0.mean_a2) < mpf("1e-45")
        assert m1.mean_n == m0.mean_n
        s0 = principal_squeezing_from_moments(m0).s
        s1 = principal_squeezing_from_moments(m1).s
        assert abs(s0 - s1) < mpf("1e-44")
