from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_ivp
from scipy.special import lambertw

from oleinik_stability.errors import ConfigurationError, DomainError
from oleinik_stability.waves import (WavePattern, WaveParameters, build_approx_rarefaction,
                                     build_shock_profile, classify_riemann,
                                     exact_rarefaction_eval, rarefaction_norms,
                                     rarefaction_sup_gap, shock_tail_bounds)


@pytest.fixture(scope="module")
def degenerate():
    return WaveParameters(-2.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def composite():
    return WaveParameters(-2.0, 1.2, 1.0)


@pytest.fixture(scope="module")
def shock(degenerate):
    return build_shock_profile(degenerate)


def test_classification_is_exact():
    assert classify_riemann(-2, 1) is WavePattern.DEGENERATE_SHOCK
    assert classify_riemann(Fraction(-2, 3), Fraction(1, 3)) is WavePattern.DEGENERATE_SHOCK
    assert classify_riemann(-2, 1.2) is WavePattern.SHOCK_PLUS_RAREFACTION
    assert classify_riemann(-2, 0.5) is WavePattern.SHOCK
    assert classify_riemann(-2, -3) is WavePattern.RAREFACTION
    assert classify_riemann(0, 1) is WavePattern.RAREFACTION
    assert classify_riemann(2, -1) is WavePattern.DEGENERATE_SHOCK
    assert classify_riemann(2, -1.5) is WavePattern.SHOCK_PLUS_RAREFACTION


def test_classification_rejects_equal_states():
    with pytest.raises(ConfigurationError):
        classify_riemann(-2, -2)


def test_parameters_derived_quantities(composite):
    assert composite.u_mid == 1.0
    assert composite.sigma == 3.0
    assert composite.delta_S == 3.0
    assert composite.delta_R == pytest.approx(0.2)
    assert composite.lambda_minus == 3.0
    assert composite.lambda_plus == pytest.approx(4.32)
    assert composite.u_star == 0.5


@pytest.mark.parametrize("u_plus", [0.5, -3.0])
def test_parameters_reject_wrong_ordering(u_plus):
    with pytest.raises(ConfigurationError, match="ordering"):
        WaveParameters(-2.0, u_plus)


def test_parameters_reject_bad_viscosity():
    with pytest.raises(ConfigurationError):
        WaveParameters(-2.0, 1.2, mu=0.0)


def test_profile_matches_lambert_w(shock):
    # q + e^q = c  <=>  q = c - W(e^c)
    xi = np.array([-3.0, -0.5, 0.0, 0.2, 1.0, 4.0])
    c = shock.rate * xi + shock.c0
    q = c - lambertw(np.exp(c)).real
    expected = -2.0 + 3.0 / (1.0 + np.exp(-q))
    np.testing.assert_allclose(shock.eval(xi), expected, rtol=0, atol=1e-13)


def test_profile_matches_ode_integration(shock):
    rhs = lambda x, u: (u + 2.0) * (u - 1.0) ** 2
    for end in (3.0, -1.0):
        sol = solve_ivp(rhs, (0.0, end), [0.0], rtol=1e-12, atol=1e-14)
        assert shock.eval(end) == pytest.approx(sol.y[0, -1], abs=1e-9)


def test_profile_normalisation_and_crossings(shock):
    assert shock.eval(0.0) == pytest.approx(0.0, abs=1e-15)
    assert shock.xi_1 == pytest.approx(0.0, abs=1e-14)
    # U(xi*) = u_m / 2: p = 5/6, so xi* = (ln(5/2) + 3) / 9
    assert shock.xi_star == pytest.approx((np.log(2.5) + 3.0) / 9.0, rel=1e-14)
    assert shock.eval(shock.xi_star) == pytest.approx(0.5, abs=1e-13)


def test_profile_inverse_roundtrip(shock):
    u = np.linspace(-1.99, 0.99, 31)
    np.testing.assert_allclose(shock.eval(shock.xi_of(u)), u, atol=1e-12)
    with pytest.raises(DomainError):
        shock.xi_of(1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-60.0, 5000.0))
def test_profile_residual_and_bounds(xi):
    shock = build_shock_profile(WaveParameters(-2.0, 1.0))
    u, du, _ = shock.evaluate(np.array([xi]))
    assert -2.0 <= u[0] <= 1.0
    assert shock.gap_left(xi) > 0 and shock.gap_right(xi) > 0
    assert du[0] >= 0.0
    assert shock.residual(np.array([xi]))[0] < 1e-12


def test_profile_second_derivative_by_differences(shock):
    xi = np.array([-0.7, 0.1, 0.9, 3.0])
    h = 1e-4
    fd = (shock.eval_deriv(xi + h) - shock.eval_deriv(xi - h)) / (2 * h)
    np.testing.assert_allclose(shock.eval_deriv2(xi), fd, rtol=1e-6, atol=1e-10)


def test_profile_mass_equals_jump(shock):
    mass, _ = quad(lambda x: float(shock.eval_deriv(x)), -np.inf, np.inf, limit=400)
    assert mass == pytest.approx(3.0, rel=1e-8)


def test_profile_tails(shock):
    right = shock_tail_bounds(shock, "right")
    left = shock_tail_bounds(shock, "left")
    assert right.exponent == pytest.approx(1.0, abs=0.01)
    # u_m - U ~ mu / (delta_S^2 ... ) so the prefactor is 1/3 for these data
    assert right.prefactor == pytest.approx(1 / 3, rel=0.02)
    assert left.exponent == pytest.approx(9.0, rel=1e-6)
    with pytest.raises(ConfigurationError):
        shock_tail_bounds(shock, "middle")


def test_profile_rejects_non_sonic_middle_state():
    with pytest.raises(ConfigurationError):
        build_shock_profile(WaveParameters(-2.0, 1.2, u_mid=0.8))


def test_foot_point_solves_characteristics(composite):
    r = build_approx_rarefaction(composite)
    a, b = r._ab
    x = np.linspace(-50, 150, 41)
    for t in (0.0, 1.0, 25.0, 1e4):
        x0 = r.foot_point(t, x)
        np.testing.assert_allclose(x0 + t * (a + b * np.tanh(x0)), x, atol=1e-9 * max(1, t))


def test_rarefaction_far_fields_and_monotone(composite):
    r = build_approx_rarefaction(composite)
    x = np.linspace(-200, 300, 2001)
    u = r.eval(10.0, x)
    assert u[0] == pytest.approx(1.0, abs=1e-12)
    assert u[-1] == pytest.approx(1.2, abs=1e-12)
    assert np.all(np.diff(u) >= -1e-15)
    assert np.all(r.eval_x(10.0, x) >= 0)


def test_rarefaction_derivatives_by_differences(composite):
    r = build_approx_rarefaction(composite)
    x = np.array([-1.0, 5.0, 20.0, 38.0])
    h = 1e-5
    fd1 = (r.eval(10.0, x + h) - r.eval(10.0, x - h)) / (2 * h)
    fd2 = (r.eval_x(10.0, x + h) - r.eval_x(10.0, x - h)) / (2 * h)
    # central differences of u ~ 1 carry about eps / h = 2e-11 of rounding
    np.testing.assert_allclose(r.eval_x(10.0, x), fd1, rtol=1e-6, atol=1e-10)
    np.testing.assert_allclose(r.eval_xx(10.0, x), fd2, rtol=1e-5, atol=1e-11)


def test_rarefaction_solves_inviscid_burgers_for_speed(composite):
    # w = 3u^2 obeys w_t + w w_x = 0
    r = build_approx_rarefaction(composite)
    x = np.linspace(-10, 60, 15)
    t, dt = 10.0, 1e-5
    w = lambda tt: 3 * r.eval(tt, x) ** 2
    wt = (w(t + dt) - w(t - dt)) / (2 * dt)
    wx = 6 * r.eval(t, x) * r.eval_x(t, x)
    np.testing.assert_allclose(wt + w(t) * wx, 0.0, atol=1e-7)


def test_rarefaction_norms_against_quadrature(composite):
    r = build_approx_rarefaction(composite)
    t = 10.0
    nx, _ = rarefaction_norms(r, t, (1.0, 2.0, np.inf))
    ux = lambda x: float(r.eval_x(t, np.array([x]))[0])
    l2, _ = quad(lambda x: ux(x) ** 2, -100, 200, points=[30, 43.2], limit=400)
    assert nx[1.0] == pytest.approx(0.2, abs=1e-10)
    assert nx[2.0] == pytest.approx(np.sqrt(l2), rel=1e-8)
    grid = np.linspace(-100, 200, 300001)
    assert nx[np.inf] == pytest.approx(r.eval_x(t, grid).max(), rel=1e-6)


def test_exact_fan():
    p = WaveParameters(-2.0, 1.2)
    x = np.array([0.0, 30.0, 36.0, 43.2, 100.0])
    u = exact_rarefaction_eval(p, 10.0, x)
    np.testing.assert_allclose(u, [1.0, 1.0, np.sqrt(1.2), 1.2, 1.2])
    with pytest.raises(DomainError):
        exact_rarefaction_eval(p, 0.0, x)


def test_approximate_fan_converges_to_exact(composite):
    r = build_approx_rarefaction(composite)
    early, late = rarefaction_sup_gap(r, 10.0), rarefaction_sup_gap(r, 1e3)
    assert late < early / 10
