import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oleinik_stability.errors import ConfigurationError, DomainError
from oleinik_stability.waves import WaveParameters
from oleinik_stability.weight import (WeightFunction, h_terms, h_terms_closed, junction_fd_jumps,
                                      junction_mismatch, poincare_check, poincare_factor,
                                      poincare_factor_closed, random_band_limited, weight_algebra)

# Minimum of H1 + H2 for u_m = 1, from sympy: the sextic branch
# -1800u^8 + 400u^7 + 3950u^6 - 3225u^5 + 775u^4/2 + 325u^3 - 75u^2/2 - 25u/8 + 25/8
# has its only interior critical point in [0, 1/2) at u = 0.1059230515.
H_SUM_MIN = 2.7708776522769
H_SUM_ARGMIN = 0.1059230515


@pytest.fixture(scope="module")
def wf():
    return WeightFunction(WaveParameters(-2.0, 1.2))


def test_weight_values(wf):
    u = np.array([-2.0, -1.0, 0.0, 0.25, 0.5, 1.0])
    expected = [7.5, 5.0, 2.5, 2.5 * 0.75 * (4 / 64 + 1), 1.875, 1.875]
    np.testing.assert_allclose(wf.eval(u), expected, rtol=1e-15)


def test_weight_derivatives_by_differences(wf):
    u = np.array([-1.5, -0.3, 0.1, 0.3, 0.45, 0.8])
    h = 1e-6
    np.testing.assert_allclose(wf.eval_d1(u), (wf.eval(u + h) - wf.eval(u - h)) / (2 * h),
                               rtol=1e-7, atol=1e-8)
    np.testing.assert_allclose(wf.eval_d2(u), (wf.eval_d1(u + h) - wf.eval_d1(u - h)) / (2 * h),
                               rtol=1e-7, atol=1e-7)


def test_weight_is_c2(wf):
    assert max(junction_mismatch(wf).values()) < 1e-14
    assert max(junction_fd_jumps(wf).values()) < 1e-6


def test_weight_domain(wf):
    with pytest.raises(DomainError):
        wf.eval(1.5)
    with pytest.raises(DomainError):
        wf.eval(-2.1)
    assert wf.sup() == pytest.approx(7.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5.0))
def test_weight_scales_with_u_m(m):
    wf = WeightFunction(WaveParameters(-2 * m, 2 * m))
    u = np.linspace(-2 * m, m, 101)
    base = WeightFunction(WaveParameters(-2.0, 2.0)).eval(u / m)
    np.testing.assert_allclose(wf.eval(u), m**2 * base, rtol=1e-12)


def test_h_terms_definition_matches_closed_form(wf):
    u = np.linspace(-2.0, 1.0, 2001, endpoint=False)
    h1, h2 = h_terms(wf, u)
    c1, c2, tot = h_terms_closed(1.0, u)
    np.testing.assert_allclose(h1, c1, atol=1e-11)
    np.testing.assert_allclose(h2, c2, atol=1e-11)
    np.testing.assert_allclose(h1 + h2, tot, atol=1e-11)


def test_h_sum_region_values():
    _, _, tot = h_terms_closed(1.0, np.array([-2.0, -1e-300, 0.5, 0.9999]))
    np.testing.assert_allclose(tot, [75 / 8, 25 / 8, 225 / 16, 225 / 16 * 0.9999 + 225 / 32])


def test_h_sum_minimum(wf):
    u = np.linspace(0.10, 0.11, 100001)
    h1, h2 = h_terms(wf, u)
    s = h1 + h2
    assert s.min() == pytest.approx(H_SUM_MIN, abs=1e-10)
    assert u[np.argmin(s)] == pytest.approx(H_SUM_ARGMIN, abs=1e-6)


def test_poincare_factor_closed_form(wf):
    u = np.linspace(-2.0, 0.4999, 1001)
    np.testing.assert_allclose(poincare_factor(wf, u), poincare_factor_closed(1.0, u), atol=1e-14)
    # the factor touches 1/6 exactly at u_minus
    assert poincare_factor_closed(1.0, -2.0) == pytest.approx(1 / 6, rel=1e-15)


def test_weight_algebra_report(wf):
    rep = weight_algebra(wf)
    assert rep.passed
    assert rep.max_rel_discrepancy < 1e-12
    assert rep.sum.min() > 2.0
    assert rep.rows().shape == (10_000, len(rep.header))
    with pytest.raises(ConfigurationError):
        weight_algebra(wf, n_samples=10)


def test_poincare_linear_is_extremal():
    r = poincare_check(lambda y: y, lambda y: np.ones_like(y))
    assert r.lhs == pytest.approx(1 / 12, abs=1e-14)
    assert r.rhs == pytest.approx(1 / 12, abs=1e-14)
    assert abs(r.lhs - r.rhs) <= r.error_bound
    assert r.satisfied


def test_poincare_quadratic():
    # Var(y^2) = 1/5 - 1/9 = 4/45 and (1/2) int y(1-y) (2y)^2 = 2 (1/4 - 1/5) = 1/10
    r = poincare_check(lambda y: y * y, lambda y: 2 * y)
    assert r.lhs == pytest.approx(4 / 45, abs=1e-13)
    assert r.rhs == pytest.approx(1 / 10, abs=1e-13)
    assert r.satisfied and r.margin > 0


def test_poincare_numerical_derivative():
    exact = poincare_check(np.sin, np.cos)
    approx = poincare_check(np.sin)
    assert approx.rhs == pytest.approx(exact.rhs, rel=1e-6)


def test_poincare_rejects_bad_resolution():
    with pytest.raises(ConfigurationError):
        poincare_check(lambda y: y, n_intervals=1002)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_poincare_random_functions(seed):
    f, df = random_band_limited(np.random.default_rng(seed))
    assert poincare_check(f, df).satisfied
