import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oleinik_stability.errors import FitQualityError
from oleinik_stability.fitting import fit_exponential, fit_log_corrected, fit_power_law


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 3.0) | st.floats(-3.0, -0.1), st.floats(0.01, 100.0))
def test_power_law_recovers_exact_data(slope, c):
    t = np.geomspace(1, 1e3, 12)
    fit = fit_power_law(t, c * t**slope)
    assert fit.slope == pytest.approx(slope, abs=1e-10)
    assert fit.prefactor == pytest.approx(c, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.n_points == 12 and fit.x_range == pytest.approx((0.0, np.log(1e3)))


def test_exponential_fit():
    x = np.linspace(0, 5, 20)
    fit = fit_exponential(x, 3 * np.exp(-9 * x))
    assert fit.slope == pytest.approx(-9.0)
    assert fit.prefactor == pytest.approx(3.0)


def test_fit_quality_gate():
    rng = np.random.default_rng(0)
    t = np.geomspace(1, 100, 30)
    with pytest.raises(FitQualityError):
        fit_power_law(t, np.exp(rng.normal(size=30)), min_r2=0.95)
    with pytest.raises(FitQualityError):
        fit_power_law(t, -t)
    with pytest.raises(FitQualityError):
        fit_exponential(t[:2], t[:2])
    with pytest.raises(FitQualityError):
        fit_power_law(t, np.full(30, np.nan))


def test_log_corrected_fit_recovers_parameters():
    t = np.geomspace(10, 1e5, 25)
    y = 0.7 * t**-1.0 * np.log1p(2.0 * t) ** 0.8
    fit = fit_log_corrected(t, y)
    assert fit.alpha == pytest.approx(1.0, abs=1e-6)
    assert fit.prefactor == pytest.approx(0.7, rel=1e-5)
    assert fit.k == pytest.approx(2.0, rel=1e-4)
    assert fit.r_squared == pytest.approx(1.0)
