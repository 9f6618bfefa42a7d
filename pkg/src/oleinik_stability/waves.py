"""Riemann classification, the degenerate viscous shock and the rarefaction waves.

The flux is f(u) = u^3.  For a left state u_minus < 0 the sonic shock connects
u_minus to u_mid = -u_minus/2 with speed sigma = 3 u_mid^2 = f'(u_mid).  Its
travelling profile solves

    mu U' = (U - u_minus) (U - u_mid)^2,

which integrates in closed form.  Writing U = u_minus + delta_S p and
q = log(p / (1 - p)), the implicit integral collapses to

    q + exp(q) = delta_S^2 xi / mu + c0,

a scalar relation with an explicit bracket for every right-hand side.  The
profile is evaluated by solving it with bracketed Newton, never by marching.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.special import expit

from . import _kernels
from .errors import ConfigurationError, DomainError, FitQualityError, NumericalError
from .fitting import fit_exponential, fit_power_law


def flux(u):
    return u**3


def flux_prime(u):
    return 3.0 * u**2


class WavePattern(str, Enum):
    SHOCK = "shock"
    DEGENERATE_SHOCK = "degenerate_shock"
    RAREFACTION = "rarefaction"
    SHOCK_PLUS_RAREFACTION = "shock_plus_rarefaction"


def classify_riemann(u_minus, u_plus):
    """Entropy-admissible Riemann structure for the cubic flux.

    Comparisons are exact: floats and ints are converted to ``Fraction`` so the
    degenerate case u_plus = -u_minus/2 is detected without rounding.
    """
    a, b = Fraction(u_minus), Fraction(u_plus)
    if a == b:
        raise ConfigurationError("Riemann data must have distinct states")
    if a == 0:
        return WavePattern.RAREFACTION
    sonic = -a / 2
    if a < 0:
        if b < a:
            return WavePattern.RAREFACTION
        if b < sonic:
            return WavePattern.SHOCK
        if b == sonic:
            return WavePattern.DEGENERATE_SHOCK
        return WavePattern.SHOCK_PLUS_RAREFACTION
    if b > a:
        return WavePattern.RAREFACTION
    if b > sonic:
        return WavePattern.SHOCK
    if b == sonic:
        return WavePattern.DEGENERATE_SHOCK
    return WavePattern.SHOCK_PLUS_RAREFACTION


@dataclass(frozen=True)
class WaveParameters:
    """Far-field states and viscosity of a degenerate shock attached to a rarefaction.

    ``u_mid`` defaults to the sonic state -u_minus/2.  Passing another value is
    allowed so that non-degenerate data can be rejected by the profile builder.
    """

    u_minus: float
    u_plus: float
    mu: float = 1.0
    u_mid: float = None

    def __post_init__(self):
        if self.u_mid is None:
            object.__setattr__(self, "u_mid", -self.u_minus / 2.0)
        for name in ("u_minus", "u_plus", "mu", "u_mid"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ConfigurationError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if self.mu <= 0:
            raise ConfigurationError(f"viscosity mu must be positive, got {self.mu}")
        if not (self.u_minus < 0 < self.u_mid <= self.u_plus):
            raise ConfigurationError(
                "composite-wave ordering u_minus < 0 < u_mid <= u_plus violated: "
                f"u_minus={self.u_minus}, u_mid={self.u_mid}, u_plus={self.u_plus}")

    @property
    def u_star(self):
        return self.u_mid / 2.0

    @property
    def sigma(self):
        """Rankine-Hugoniot speed between u_minus and u_mid."""
        a, b = self.u_minus, self.u_mid
        return a * a + a * b + b * b

    @property
    def delta_S(self):
        return self.u_mid - self.u_minus

    @property
    def delta_R(self):
        return self.u_plus - self.u_mid

    @property
    def lambda_minus(self):
        return 3.0 * self.u_mid**2

    @property
    def lambda_plus(self):
        return 3.0 * self.u_plus**2

    @property
    def is_degenerate(self):
        return abs(self.u_mid + self.u_minus / 2.0) <= 1e-14 * abs(self.u_minus)

    def as_dict(self):
        return {"u_minus": self.u_minus, "u_plus": self.u_plus, "mu": self.mu,
                "u_mid": self.u_mid}


# ---------------------------------------------------------------- shock profile

@dataclass(frozen=True)
class ShockProfile:
    """Degenerate viscous shock profile, evaluated by exact inversion.

    ``origin_value`` fixes the translation: U(0) = origin_value (0 by default,
    which puts the zero crossing xi_1 at the origin).
    """

    params: WaveParameters
    origin_value: float = 0.0
    tolerance: float = 1e-12
    maxiter: int = 100
    c0: float = field(init=False)
    rate: float = field(init=False)

    def __post_init__(self):
        p = self.params
        p0 = (self.origin_value - p.u_minus) / p.delta_S
        if not 0.0 < p0 < 1.0:
            raise ConfigurationError(
                f"origin value {self.origin_value} must lie strictly between "
                f"u_minus={p.u_minus} and u_mid={p.u_mid}")
        q0 = np.log(p0 / (1.0 - p0))
        object.__setattr__(self, "c0", float(q0 + np.exp(q0)))
        object.__setattr__(self, "rate", p.delta_S**2 / p.mu)

    @property
    def normalization(self):
        return f"U(0) = {self.origin_value}"

    def xi_of(self, u):
        """Closed-form inverse: the position where the profile equals ``u``."""
        p = self.params
        s = (np.asarray(u, float) - p.u_minus) / p.delta_S
        if np.any((s <= 0) | (s >= 1)):
            raise DomainError("profile inverse needs u strictly inside (u_minus, u_mid)")
        q = np.log(s) - np.log1p(-s)
        return (q + np.exp(q) - self.c0) / self.rate

    @property
    def xi_1(self):
        return float(self.xi_of(0.0))

    @property
    def xi_star(self):
        return float(self.xi_of(self.params.u_star))

    def logit(self, xi, guess=None):
        """Return q(xi) solving q + exp(q) = rate*xi + c0."""
        xi = np.asarray(xi, float)
        c = np.ascontiguousarray(self.rate * xi + self.c0).reshape(-1)
        if guess is None:
            q = np.full(c.shape, np.nan)
        else:
            q = np.array(guess, float, copy=True).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise DomainError("profile evaluated at non-finite position")
        bad = _kernels.solve_logit_relation(c, q, self.tolerance, self.maxiter)
        if bad >= 0:
            raise NumericalError(
                f"profile inversion did not converge at xi={xi.reshape(-1)[bad]!r} "
                f"(c={c[bad]!r}, last q={q[bad]!r})")
        return q.reshape(xi.shape)

    def from_logit(self, q):
        """(U, U', U'') from the logit variable, free of cancellation in both tails."""
        p = self.params
        d = p.delta_S
        left = expit(q)          # (U - u_minus) / d
        right = expit(-q)        # (u_mid - U) / d
        u = p.u_minus + d * left
        u = np.where(q > 0, p.u_mid - d * right, u)
        du = d * self.rate * left * right * right
        d2u = du * self.rate * right * (1.0 - 3.0 * left)
        return u, du, d2u

    def evaluate(self, xi):
        return self.from_logit(self.logit(xi))

    def eval(self, xi):
        return self.evaluate(xi)[0]

    def eval_deriv(self, xi):
        return self.evaluate(xi)[1]

    def eval_deriv2(self, xi):
        return self.evaluate(xi)[2]

    def gap_left(self, xi):
        """U - u_minus, accurate where it is tiny."""
        return self.params.delta_S * expit(self.logit(xi))

    def gap_right(self, xi):
        """u_mid - U, accurate where it is tiny."""
        return self.params.delta_S * expit(-self.logit(xi))

    def residual(self, xi):
        """|mu U' - (U - u_minus)(U - u_mid)^2| using the cancellation-free gaps."""
        p = self.params
        q = self.logit(xi)
        _, du, _ = self.from_logit(q)
        gl = p.delta_S * expit(q)
        gr = p.delta_S * expit(-q)
        return np.abs(p.mu * du - gl * gr * gr)


def build_shock_profile(params, normalization=0.0, tolerance=1e-12):
    """Build the sonic shock profile for degenerate parameters.

    ``normalization`` is the profile value at xi = 0 (default 0).
    """
    if tolerance <= 0:
        raise ConfigurationError("tolerance must be positive")
    if not params.is_degenerate:
        raise ConfigurationError(
            f"profile requires the sonic state u_mid = -u_minus/2; got "
            f"u_mid={params.u_mid}, -u_minus/2={-params.u_minus / 2}")
    return ShockProfile(params, float(normalization), float(tolerance))


@dataclass(frozen=True)
class TailFit:
    side: str
    law: str              # "exponential" or "algebraic"
    exponent: float       # rate for exponential, order for algebraic
    prefactor: float
    r_squared: float
    window: tuple
    curvature_ratio_sup: float


def shock_tail_bounds(profile, side, window=None, n_samples=400, min_r2=0.98):
    """Fit the decay law of the profile tail on one side.

    Left: U - u_minus ~ C exp(rate * xi).  Right: u_mid - U ~ C xi^-order.
    Default windows are fixed in the scaled variable delta_S^2 xi / mu.
    Also reports sup |U''| / |U'| over the window.
    """
    s = 1.0 / profile.rate
    if side == "left":
        lo, hi = window if window is not None else (-400 * s, -40 * s)
        if hi >= 0:
            raise ConfigurationError("left-tail window must be negative")
        xi = np.linspace(lo, hi, n_samples)
        gap = profile.gap_left(xi)
        if np.any(gap <= 0) or not np.all(np.isfinite(gap)):
            raise FitQualityError("left tail underflows on the requested window")
        fit = fit_exponential(xi, gap, min_r2)
        law, exponent = "exponential", fit.slope
    elif side == "right":
        lo, hi = window if window is not None else (500 * s, 5e4 * s)
        if lo <= 0:
            raise ConfigurationError("right-tail window must be positive")
        xi = np.geomspace(lo, hi, n_samples)
        gap = profile.gap_right(xi)
        fit = fit_power_law(xi, gap, min_r2)
        law, exponent = "algebraic", -fit.slope
    else:
        raise ConfigurationError(f"side must be 'left' or 'right', got {side!r}")
    _, du, d2u = profile.evaluate(xi)
    ratio = float(np.max(np.abs(d2u) / du))
    return TailFit(side, law, float(exponent), fit.prefactor, fit.r_squared,
                   (float(lo), float(hi)), ratio)


# ---------------------------------------------------------------- rarefactions

def lambda_inverse(w):
    """Positive branch of the inverse of lambda(u) = 3u^2."""
    w = np.asarray(w, float)
    if np.any(w <= 0):
        raise DomainError("characteristic speed must be positive on the rarefaction branch")
    return np.sqrt(w / 3.0)


@dataclass(frozen=True)
class RarefactionFields:
    x0: np.ndarray
    w: np.ndarray
    u: np.ndarray
    u_x: np.ndarray
    u_xx: np.ndarray


@dataclass(frozen=True)
class ApproxRarefaction:
    """Smooth rarefaction from Burgers characteristics with tanh initial speeds.

    w(0, x) = (lambda_+ + lambda_-)/2 + (lambda_+ - lambda_-)/2 tanh x, transported
    along x = x0 + w(0, x0) t, and u = sqrt(w / 3).
    """

    params: WaveParameters
    tolerance: float = 1e-12
    maxiter: int = 200

    @property
    def lambda_minus(self):
        return self.params.lambda_minus

    @property
    def lambda_plus(self):
        return self.params.lambda_plus

    @property
    def _ab(self):
        lm, lp = self.lambda_minus, self.lambda_plus
        return 0.5 * (lp + lm), 0.5 * (lp - lm)

    def initial_speed(self, x0):
        a, b = self._ab
        return a + b * np.tanh(x0)

    def foot_point(self, t, x, guess=None):
        if t < 0:
            raise DomainError("rarefaction time must be non-negative")
        x = np.asarray(x, float)
        xf = np.ascontiguousarray(x).reshape(-1)
        x0 = np.full(xf.shape, np.nan) if guess is None else np.array(guess, float).reshape(-1)
        a, b = self._ab
        if b == 0.0:
            return x.copy()
        bad = _kernels.solve_characteristic_foot(xf, float(t), a, b, x0,
                                                 self.tolerance, self.maxiter)
        if bad >= 0:
            raise NumericalError(
                f"characteristic foot solve failed at t={t}, x={xf[bad]!r}")
        return x0.reshape(x.shape)

    def fields_from_foot(self, t, x0):
        a, b = self._ab
        th = np.tanh(x0)
        sech2 = 1.0 - th * th
        w = a + b * th
        w0p = b * sech2
        w0pp = -2.0 * b * th * sech2
        jac = 1.0 + w0p * t
        w_x = w0p / jac
        w_xx = w0pp / jac**3
        u = np.sqrt(w / 3.0)
        u_x = w_x / (6.0 * u)
        u_xx = w_xx / (6.0 * u) - w_x * w_x / (36.0 * u**3)
        return RarefactionFields(x0, w, u, u_x, u_xx)

    def fields(self, t, x, guess=None):
        return self.fields_from_foot(t, self.foot_point(t, x, guess))

    def eval(self, t, x):
        return self.fields(t, x).u

    def eval_x(self, t, x):
        return self.fields(t, x).u_x

    def eval_xx(self, t, x):
        return self.fields(t, x).u_xx


def build_approx_rarefaction(params, tolerance=1e-12):
    if tolerance <= 0:
        raise ConfigurationError("tolerance must be positive")
    if not params.u_mid < params.u_plus:
        raise ConfigurationError("rarefaction needs u_mid < u_plus")
    return ApproxRarefaction(params, float(tolerance))


@dataclass(frozen=True)
class ExactRarefaction:
    """Self-similar fan connecting u_mid to u_plus."""

    params: WaveParameters

    def eval(self, t, x):
        if np.any(np.asarray(t) <= 0):
            raise DomainError("exact rarefaction needs t > 0")
        p = self.params
        w = np.clip(np.asarray(x, float) / t, p.lambda_minus, p.lambda_plus)
        return np.sqrt(w / 3.0)


def exact_rarefaction_eval(params, t, x):
    return ExactRarefaction(params).eval(t, x)


@dataclass(frozen=True)
class DecayReport:
    """Norms of u^R_x and u^R_xx per time, with log-log exponents per p."""

    times: np.ndarray
    p_values: tuple
    ux_norms: dict         # p -> array over times
    uxx_norms: dict
    ux_fits: dict          # p -> FitResult
    uxx_fits: dict


def _lp(values, weights, dx0, p):
    if np.isinf(p):
        return float(np.max(values))
    return float(np.sum(values**p * weights) * dx0) ** (1.0 / p)


def rarefaction_norms(r, t, p_values, half_width=40.0, n=16001):
    """L^p norms of u^R_x(t) and u^R_xx(t) computed in characteristic coordinates.

    The substitution x = x0 + w0(x0) t has Jacobian 1 + w0'(x0) t, so every
    integrand becomes smooth on a fixed x0 interval independent of t and the
    trapezoid rule converges spectrally.  The sup norm is refined by a bounded
    scalar maximisation around the grid maximiser.
    """
    from scipy.optimize import minimize_scalar

    x0 = np.linspace(-half_width, half_width, n)
    dx0 = x0[1] - x0[0]
    f = r.fields_from_foot(t, x0)
    a, b = r._ab
    jac = 1.0 + b * (1.0 - np.tanh(x0) ** 2) * t
    ux, uxx = np.abs(f.u_x), np.abs(f.u_xx)
    out_x, out_xx = {}, {}
    for p in p_values:
        out_x[p] = _lp(ux, jac, dx0, p)
        out_xx[p] = _lp(uxx, jac, dx0, p)
        if np.isinf(p):
            for arr, store, attr in ((ux, out_x, "u_x"), (uxx, out_xx, "u_xx")):
                k = int(np.argmax(arr))
                lo, hi = x0[max(k - 1, 0)], x0[min(k + 1, n - 1)]
                res = minimize_scalar(
                    lambda y: -abs(float(getattr(r.fields_from_foot(t, np.array([y])), attr)[0])),
                    bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
                store[p] = max(store[p], -float(res.fun))
    return out_x, out_xx


def rarefaction_decay_report(r, times, p_values, min_r2=None):
    times = np.asarray(times, float)
    if times.size == 0 or len(p_values) == 0:
        raise ConfigurationError("decay report needs non-empty times and p_values")
    if np.any(times < 1):
        raise ConfigurationError("decay report needs times >= 1")
    p_values = tuple(float(p) for p in p_values)
    ux = {p: np.empty(times.size) for p in p_values}
    uxx = {p: np.empty(times.size) for p in p_values}
    for i, t in enumerate(times):
        nx, nxx = rarefaction_norms(r, t, p_values)
        for p in p_values:
            ux[p][i] = nx[p]
            uxx[p][i] = nxx[p]
    fx = {p: fit_power_law(times, ux[p], min_r2) for p in p_values if times.size >= 3}
    fxx = {p: fit_power_law(times, uxx[p], min_r2) for p in p_values if times.size >= 3}
    return DecayReport(times, p_values, ux, uxx, fx, fxx)


def rarefaction_sup_gap(r, t, half_width=60.0, n=200001):
    """sup_x |u^R(t, x) - u^r(x / t)|, sampled densely in characteristic coordinates."""
    x0 = np.linspace(-half_width, half_width, n)
    x = x0 + r.initial_speed(x0) * t
    u_r = r.fields_from_foot(t, x0).u
    u_fan = exact_rarefaction_eval(r.params, t, x)
    return float(np.max(np.abs(u_r - u_fan)))
