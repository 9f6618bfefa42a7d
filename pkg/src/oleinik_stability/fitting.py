"""Small regression helpers used by the decay and tail reports."""

from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import FitQualityError


@dataclass(frozen=True)
class FitResult:
    """Straight-line fit in transformed coordinates."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int
    x_range: tuple

    @property
    def prefactor(self):
        return float(np.exp(self.intercept))


def _linear(x, y, min_r2):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 3 or not np.all(np.isfinite(y)):
        raise FitQualityError(f"need >= 3 finite samples, got {x.size}")
    res = stats.linregress(x, y)
    fit = FitResult(float(res.slope), float(res.intercept), float(res.rvalue**2),
                    int(x.size), (float(x.min()), float(x.max())))
    if min_r2 is not None and fit.r_squared < min_r2:
        raise FitQualityError(f"R^2 = {fit.r_squared:.4f} below {min_r2}")
    return fit


def fit_power_law(t, y, min_r2=None):
    """Fit y ~ C t^slope by least squares in log-log coordinates."""
    y = np.asarray(y, float)
    if np.any(y <= 0):
        raise FitQualityError("power-law fit needs positive samples")
    return _linear(np.log(t), np.log(y), min_r2)


def fit_exponential(x, y, min_r2=None):
    """Fit y ~ C exp(slope x)."""
    y = np.asarray(y, float)
    if np.any(y <= 0):
        raise FitQualityError("exponential fit needs positive samples")
    return _linear(x, np.log(y), min_r2)


@dataclass(frozen=True)
class LogCorrectedFit:
    """Fit of y = A t^-alpha log(1 + K t)^beta with beta fixed."""

    alpha: float
    prefactor: float
    k: float
    beta: float
    r_squared: float


def fit_log_corrected(t, y, beta=0.8):
    """Fit a power law with a logarithmic correction; alpha, A and K are free."""
    t = np.asarray(t, float)
    ly = np.log(np.asarray(y, float))

    def model(tt, log_a, alpha, log_k):
        return log_a - alpha * np.log(tt) + beta * np.log(np.log1p(np.exp(log_k) * tt))

    p0 = (ly[0] + np.log(t[0]), 1.0, 0.0)
    popt, _ = optimize.curve_fit(model, t, ly, p0=p0, maxfev=20000)
    resid = ly - model(t, *popt)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return LogCorrectedFit(float(popt[1]), float(np.exp(popt[0])),
                           float(np.exp(popt[2])), beta, float(r2))
