"""Piecewise weight w(u) for the sonic shock and the algebra behind its contraction.

With u_m = u_mid and u_* = u_m / 2 the weight is

    w = (5/2) u_m (u_m - u)                          for u_minus <= u < 0,
    w = 5/(2 u_m^2) (u_m - u)(4u^3 + u_m^3)          for 0 <= u < u_*,
    w = (15/8) u_m^2                                 for u_* <= u <= u_m,

which is C^2 across both junctions.  H1 and H2 are the two brackets that must
sum to more than 2 u_m^4 for the weighted dissipation to dominate.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class WeightFunction:
    params: object

    @property
    def u_m(self):
        return self.params.u_mid

    def _check(self, u):
        u = np.asarray(u, float)
        p = self.params
        span = p.u_mid - p.u_minus
        if np.any((u < p.u_minus - 1e-12 * span) | (u > p.u_mid + 1e-12 * span)):
            raise DomainError(f"weight evaluated outside [{p.u_minus}, {p.u_mid}]")
        return u

    def _regions(self, u):
        return u < 0.0, (u >= 0.0) & (u < self.u_m / 2.0)

    def eval(self, u):
        u = self._check(u)
        m = self.u_m
        r1, r2 = self._regions(u)
        return np.select([r1, r2], [2.5 * m * (m - u),
                                    2.5 / m**2 * (m - u) * (4 * u**3 + m**3)],
                         1.875 * m * m)

    def eval_d1(self, u):
        u = self._check(u)
        m = self.u_m
        r1, r2 = self._regions(u)
        mid = 2.5 / m**2 * (12 * m * u**2 - 16 * u**3 - m**3)
        return np.select([r1, r2], [np.full_like(u, -2.5 * m), mid], 0.0)

    def eval_d2(self, u):
        u = self._check(u)
        m = self.u_m
        r1, r2 = self._regions(u)
        mid = 2.5 / m**2 * (24 * m * u - 48 * u**2)
        return np.select([r1, r2], [np.zeros_like(u), mid], 0.0)

    def sup(self):
        return 2.5 * self.u_m * (self.u_m - self.params.u_minus)


def weight_eval(wf, u):
    return wf.eval(u), wf.eval_d1(u), wf.eval_d2(u)


# branch polynomials, used for the one-sided junction comparison
def _branches(m):
    left = np.polynomial.Polynomial([2.5 * m * m, -2.5 * m])
    mid = np.polynomial.Polynomial([m**3, 0, 0, 4]) * np.polynomial.Polynomial([m, -1]) * (2.5 / m**2)
    right = np.polynomial.Polynomial([1.875 * m * m])
    return left, mid, right


def junction_mismatch(wf):
    """Largest relative one-sided mismatch of w, w', w'' at u = 0 and u = u_*."""
    m = wf.u_m
    left, mid, right = _branches(m)
    out = {}
    for name, (a, b, at) in {"zero": (left, mid, 0.0), "u_star": (mid, right, m / 2)}.items():
        for k in range(3):
            va, vb = a.deriv(k)(at) if k else a(at), b.deriv(k)(at) if k else b(at)
            out[f"{name}_d{k}"] = abs(va - vb) / max(1.0, abs(va), abs(vb))
    return out


# fourth-order one-sided first-derivative stencil
_ONE_SIDED = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def junction_fd_jumps(wf, step=1e-4):
    """Jumps of finite-difference derivatives of w (and of w') across the junctions.

    One-sided fourth-order stencils from each side; w is piecewise polynomial of
    degree <= 4 so the stencils are exact up to rounding.
    """
    out = {}
    k = np.arange(5)
    for name, at in (("zero", 0.0), ("u_star", wf.u_m / 2)):
        for order, g in ((1, wf.eval), (2, wf.eval_d1)):
            right = _ONE_SIDED @ g(at + k * step) / step
            left = -(_ONE_SIDED @ g(at - k * step)) / step
            out[f"{name}_d{order}"] = float(abs(right - left))
    return out


@dataclass(frozen=True)
class WeightAlgebraReport:
    u: np.ndarray
    w: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H1_closed: np.ndarray
    H2_closed: np.ndarray
    sum_closed: np.ndarray
    poincare_factor: np.ndarray
    poincare_factor_closed: np.ndarray
    max_rel_discrepancy: float
    counterexamples: list

    @property
    def sum(self):
        return self.H1 + self.H2

    @property
    def passed(self):
        return not self.counterexamples and self.max_rel_discrepancy < 1e-8

    def rows(self):
        cols = (self.u, self.w, self.w1, self.w2, self.H1, self.H2, self.sum,
                self.poincare_factor)
        return np.column_stack(cols)

    header = ("uS", "w", "w1", "w2", "H1", "H2", "H1plusH2", "poincare_factor")


def h_terms(wf, u, mu_uxi=None):
    """H1 and H2 by their definitions.

    ``mu_uxi`` is mu U' expressed through the state; by default the profile
    equation (u - u_minus)(u - u_m)^2 is used.
    """
    p = wf.params
    m, us, sigma = p.u_mid, p.u_star, p.sigma
    w, w1, w2 = weight_eval(wf, u)
    if mu_uxi is None:
        mu_uxi = (u - p.u_minus) * (u - m) ** 2
    h1 = ((sigma - 3 * u**2) * w1 + 3 * u * w - 0.5 * w2 * mu_uxi) * (us - p.u_minus)
    h2 = w * (w2 * (us - u) * (u + 2 * m) + 2 * w - w1 * (2 * u + 2 * m - us))
    return h1, h2


def h_terms_closed(m, u):
    """Closed-form polynomials for H1, H2 and their sum on each region (u_minus = -2 u_m)."""
    u = np.asarray(u, float)
    r1, r2 = u < 0, (u >= 0) & (u < m / 2)
    h1 = np.select([r1, r2], [
        -75 / 4 * m**4 + 75 / 4 * m**3 * u,
        375 / m * u**5 - 225 * u**4 - 750 * m * u**3 + 750 * m**2 * u**2
        - 525 / 4 * m**3 * u - 75 / 4 * m**4,
    ], 225 / 16 * m**3 * u)
    h2 = np.select([r1, r2], [
        175 / 8 * m**4 - 175 / 8 * m**3 * u,
        -1800 / m**4 * u**8 + 400 / m**3 * u**7 + 3950 / m**2 * u**6 - 3600 / m * u**5
        + 1225 / 2 * u**4 + 1075 * m * u**3 - 1575 / 2 * m**2 * u**2
        + 1025 / 8 * m**3 * u + 175 / 8 * m**4,
    ], 225 / 32 * m**4)
    total = np.select([r1, r2], [
        25 / 8 * m**3 * (m - u),
        -1800 / m**4 * u**8 + 400 / m**3 * u**7 + 3950 / m**2 * u**6 - 3225 / m * u**5
        + 775 / 2 * u**4 + 325 * m * u**3 - 75 / 2 * m**2 * u**2
        - 25 / 8 * m**3 * u + 25 / 8 * m**4,
    ], 225 / 16 * m**3 * u + 225 / 32 * m**4)
    return h1, h2, total


def poincare_factor(wf, u):
    """1 - w (u_* - u) / (u_m - u)^2 * 2 / (5 u_m), the coefficient left after Poincare."""
    m = wf.u_m
    return 1.0 - wf.eval(u) * (m / 2 - u) / (m - u) ** 2 * 2.0 / (5.0 * m)


def poincare_factor_closed(m, u):
    u = np.asarray(u, float)
    return np.where(u < 0, 0.5 * m / (m - u),
                    (8 * u**4 - 4 * m * u**3 + m**4) / (2 * m**3 * (m - u)))


def weight_algebra(wf, n_samples=10_000):
    """Sweep [u_minus, u_mid) and check H1 + H2 > 2 u_m^4 and the Poincare factor.

    The factor equals exactly 1/6 at the closed endpoint u = u_minus, which the
    profile never attains, so the strict bound is tested on the open interval.
    """
    if n_samples < 100:
        raise ConfigurationError("weight algebra needs at least 100 samples")
    p = wf.params
    m = p.u_mid
    u = np.linspace(p.u_minus, m, n_samples, endpoint=False)
    w, w1, w2 = weight_eval(wf, u)
    h1, h2 = h_terms(wf, u)
    c1, c2, ctot = h_terms_closed(m, u)

    def rel(a, b):
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), m**4)))

    disc = max(rel(h1, c1), rel(h2, c2), rel(h1 + h2, ctot), rel(c1 + c2, ctot))
    pf = np.where(u < p.u_star, poincare_factor(wf, u), np.nan)
    pfc = np.where(u < p.u_star, poincare_factor_closed(m, u), np.nan)
    disc = max(disc, float(np.nanmax(np.abs(pf - pfc))))
    bad = []
    for i in np.flatnonzero(h1 + h2 <= 2 * m**4):
        bad.append(("H1+H2 <= 2 u_m^4", float(u[i]), float((h1 + h2)[i])))
    interior = (u > p.u_minus) & (u < p.u_star)
    for i in np.flatnonzero(interior & ~(pf > 1 / 6)):
        bad.append(("poincare factor <= 1/6", float(u[i]), float(pf[i])))
    endpoint = u == p.u_minus
    for i in np.flatnonzero(endpoint & (pf < 1 / 6 - 1e-14)):
        bad.append(("poincare factor < 1/6 at u_minus", float(u[i]), float(pf[i])))
    return WeightAlgebraReport(u, w, w1, w2, h1, h2, c1, c2, ctot, pf, pfc, disc, bad)


# ---------------------------------------------------------------- Poincare check

@dataclass(frozen=True)
class PoincareResult:
    lhs: float
    rhs: float
    error_bound: float
    satisfied: bool

    @property
    def margin(self):
        return self.rhs - self.lhs


def _simpson(values, h):
    return h / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum()
                      + 2.0 * values[2:-1:2].sum())


def _simpson_with_error(g, n):
    """Composite Simpson on n intervals plus a Richardson error estimate."""
    h = 1.0 / n
    fine = _simpson(g, h)
    coarse = _simpson(g[::2], 2 * h)
    rounding = 8 * n * np.finfo(float).eps * h * float(np.sum(np.abs(g)))
    return fine, 2.0 * abs(fine - coarse) / 15.0 + rounding


def poincare_check(f, df=None, n_intervals=2048):
    """Both sides of Var(f) <= (1/2) int_0^1 y(1-y) f'(y)^2 dy.

    ``f`` and ``df`` are callables on [0, 1]; without ``df`` the derivative is
    taken by second-order differences on the quadrature nodes.  The returned
    error bound combines the propagated Richardson estimates of each integral.
    """
    if n_intervals % 4:
        raise ConfigurationError("n_intervals must be divisible by 4")
    y = np.linspace(0.0, 1.0, n_intervals + 1)
    fy = np.asarray(f(y), float)
    dfy = np.gradient(fy, y, edge_order=2) if df is None else np.asarray(df(y), float)
    if not (np.all(np.isfinite(fy)) and np.all(np.isfinite(dfy))):
        raise DomainError("non-finite integrand in Poincare check")
    i1, e1 = _simpson_with_error(fy, n_intervals)
    i2, e2 = _simpson_with_error(fy * fy, n_intervals)
    iw, ew = _simpson_with_error(y * (1 - y) * dfy * dfy, n_intervals)
    lhs = i2 - i1 * i1
    rhs = 0.5 * iw
    bound = e2 + 2 * abs(i1) * e1 + e1 * e1 + 0.5 * ew + 4 * np.finfo(float).eps * (i2 + i1 * i1)
    return PoincareResult(float(lhs), float(rhs), float(bound), bool(lhs <= rhs + bound))


def random_band_limited(rng, max_mode=8):
    """Random trigonometric polynomial on [0, 1] and its derivative."""
    k = np.arange(1, int(rng.integers(1, max_mode + 1)) + 1)
    a = rng.normal(size=k.size) / k
    b = rng.normal(size=k.size) / k
    c0 = rng.normal()

    def f(y):
        y = np.asarray(y)[..., None]
        return c0 + np.sum(a * np.cos(np.pi * k * y) + b * np.sin(np.pi * k * y), axis=-1)

    def df(y):
        y = np.asarray(y)[..., None]
        return np.sum(np.pi * k * (-a * np.sin(np.pi * k * y) + b * np.cos(np.pi * k * y)), axis=-1)

    return f, df
