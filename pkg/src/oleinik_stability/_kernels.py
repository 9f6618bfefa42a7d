"""Compiled inner loops: the two implicit root solves and the PDE right-hand side."""

import math

import numpy as np
from numba import njit

_EPS = 2.220446049250313e-16


@njit(cache=True)
def solve_logit_relation(c, q, tol, maxiter):
    """Solve q + exp(q) = c elementwise, in place on ``q``.

    ``q`` carries the initial guess; values outside the bracket (or nan) fall
    back to the upper bracket end, from which Newton descends monotonically.
    Returns the index of the first unconverged entry, or -1.
    """
    bad = -1
    for i in range(c.size):
        ci = c[i]
        if ci <= 1.0:
            lo = ci - 1.0
            hi = ci
        else:
            lc = math.log(ci)
            lo = math.log(ci - lc)
            hi = lc
        x = q[i]
        if not (x >= lo and x <= hi):
            x = hi
        scale = tol * max(1.0, abs(ci))
        ok = False
        for _ in range(maxiter):
            ex = math.exp(x)
            g = x + ex - ci
            if abs(g) <= scale:
                ok = True
                break
            if g > 0.0:
                hi = x
            else:
                lo = x
            if hi - lo <= 4.0 * _EPS * max(1.0, abs(x)):
                ok = True
                break
            xn = x - g / (1.0 + ex)
            if not (xn > lo and xn < hi):
                xn = 0.5 * (lo + hi)
            x = xn
        q[i] = x
        if not ok and bad < 0:
            bad = i
    return bad


@njit(cache=True)
def solve_characteristic_foot(x, t, a, b, x0, tol, maxiter):
    """Solve x0 + t (a + b tanh x0) = x elementwise, in place on ``x0``.

    The left side is strictly increasing, so a bracketed Newton iteration with a
    bisection fallback always converges.  Returns the first failing index or -1.
    """
    bad = -1
    if t == 0.0:
        for i in range(x.size):
            x0[i] = x[i]
        return bad
    lam_lo = a - b
    lam_hi = a + b
    for i in range(x.size):
        xi = x[i]
        lo = xi - lam_hi * t
        hi = xi - lam_lo * t
        y = x0[i]
        if not (y >= lo and y <= hi):
            s = (xi / t - a) / b
            if s <= -1.0 + 1e-12:
                y = lo
            elif s >= 1.0 - 1e-12:
                y = hi
            else:
                y = math.atanh(s)
                y = min(max(y, lo), hi)
        scale = tol * max(1.0, abs(xi))
        ok = False
        for _ in range(maxiter):
            th = math.tanh(y)
            g = y + t * (a + b * th) - xi
            if abs(g) <= scale:
                ok = True
                break
            if g > 0.0:
                hi = y
            else:
                lo = y
            if hi - lo <= 4.0 * _EPS * max(1.0, abs(y)):
                ok = True
                break
            yn = y - g / (1.0 + t * b * (1.0 - th * th))
            if not (yn > lo and yn < hi):
                yn = 0.5 * (lo + hi)
            y = yn
        x0[i] = y
        if not ok and bad < 0:
            bad = i
    return bad


@njit(cache=True)
def llf_rhs(u, h, mu, sigma, second_order, flux, out):
    """Semi-discrete right-hand side of u_t + (u^3 - sigma u)_xi = mu u_xixi.

    Local Lax-Friedrichs interface fluxes on linearly reconstructed states
    (central slopes, no limiter) plus central diffusion.  Boundary entries of
    ``out`` are zero; the caller owns the Dirichlet data.
    """
    n = u.size
    for j in range(n - 1):
        if second_order:
            if j > 0:
                sl = 0.5 * (u[j + 1] - u[j - 1])
            else:
                sl = u[1] - u[0]
            if j + 2 < n:
                sr = 0.5 * (u[j + 2] - u[j])
            else:
                sr = u[n - 1] - u[n - 2]
            ul = u[j] + 0.5 * sl
            ur = u[j + 1] - 0.5 * sr
        else:
            ul = u[j]
            ur = u[j + 1]
        gl = ul * ul * ul - sigma * ul
        gr = ur * ur * ur - sigma * ur
        al = abs(3.0 * ul * ul - sigma)
        ar = abs(3.0 * ur * ur - sigma)
        flux[j] = 0.5 * (gl + gr) - 0.5 * max(al, ar) * (ur - ul)
    inv_h = 1.0 / h
    nu = mu / (h * h)
    out[0] = 0.0
    out[n - 1] = 0.0
    for j in range(1, n - 1):
        out[j] = -(flux[j] - flux[j - 1]) * inv_h + nu * (u[j + 1] - 2.0 * u[j] + u[j - 1])
    return out


@njit(cache=True, inline="always")
def weight_value(u, m):
    if u < 0.0:
        return 2.5 * m * (m - u)
    if u < 0.5 * m:
        return 2.5 / (m * m) * (m - u) * (4.0 * u * u * u + m * m * m)
    return 1.875 * m * m


@njit(cache=True, inline="always")
def _logit_point(ci, guess, tol, maxiter):
    """Unbracketed Newton from a close guess; bracketed fallback. Returns (q, exp(q), ok)."""
    scale = tol * max(1.0, abs(ci))
    x = guess
    for _ in range(6):
        ex = math.exp(x)
        g = x + ex - ci
        if abs(g) <= scale:
            return x, ex, True
        step = g / (1.0 + ex)
        if abs(step) < 1e-7:
            # Newton error after this step is below step^2 / 2, so accept it and
            # update exp(x) by its series instead of a fresh evaluation.
            return x - step, ex * (1.0 - step * (1.0 - step * (0.5 - step / 6.0))), True
        x = x - step
        if not math.isfinite(x):
            break
    c = np.empty(1)
    q = np.empty(1)
    c[0] = ci
    q[0] = np.nan
    bad = solve_logit_relation(c, q, tol, maxiter)
    return q[0], math.exp(q[0]), bad < 0


@njit(cache=True, inline="always")
def _foot_point(xi, t, a, b, guess, tol, maxiter):
    """Same strategy for y + t (a + b tanh y) = xi. Returns (y, tanh y, ok)."""
    scale = tol * max(1.0, abs(xi))
    y = guess
    for _ in range(6):
        th = math.tanh(y)
        g = y + t * (a + b * th) - xi
        if abs(g) <= scale:
            return y, th, True
        step = g / (1.0 + t * b * (1.0 - th * th))
        if abs(step) < 1e-7:
            td = -step * (1.0 - step * step / 3.0)
            return y - step, (th + td) / (1.0 + th * td), True
        y = y - step
        if not math.isfinite(y):
            break
    x = np.empty(1)
    y0 = np.empty(1)
    x[0] = xi
    y0[0] = np.nan
    bad = solve_characteristic_foot(x, t, a, b, y0, tol, maxiter)
    return y0[0], math.tanh(y0[0]), bad < 0


@njit(cache=True)
def composite_fields(xi, X, t, X_prev, t_prev, warm, shock_on, u_minus, d, rate, c0,
                     rare_on, a, b, sigma, m, mu, q, x0, right, th, tol, maxiter,
                     value, U, U1, R, R1, wU1, F):
    """Shifted composite wave on the grid with w(U) U' and the interaction source F.

    ``q``, ``x0`` hold the roots from the previous call at (t_prev, X_prev), and
    ``right`` = 1 - p, ``th`` = tanh(x0) their by-products.  With ``warm`` set,
    a first-order predictor in (t, X) seeds one or two Newton corrections.
    Returns -1 on success, 1 + i for a failed profile solve at node i, or
    -(2 + i) for a failed characteristic solve.
    """
    n = xi.size
    dX = X - X_prev
    T = 1.0 + t
    T_prev = 1.0 + t_prev
    dx = sigma * (t - t_prev) + dX
    for i in range(n):
        if shock_on:
            ci = rate * (xi[i] + X) + c0
            if warm:
                guess = q[i] + rate * right[i] * dX
            else:
                guess = ci if ci <= 1.0 else math.log(ci)
            qi, ex, ok = _logit_point(ci, guess, tol, maxiter)
            if not ok:
                return 1 + i
            q[i] = qi
            left = ex / (1.0 + ex)
            r = 1.0 / (1.0 + ex)
            if qi > 0.0:
                u = (u_minus + d) - d * r
            else:
                u = u_minus + d * left
            right[i] = r
            U[i] = u
            U1[i] = d * rate * left * r * r
            wU1[i] = weight_value(u, m) * U1[i]
        else:
            U[i] = m
            U1[i] = 0.0
            wU1[i] = 0.0
        if rare_on:
            xv = xi[i] + sigma * t + X
            if warm:
                w0p = b * (1.0 - th[i] * th[i])
                guess = x0[i] + (dx - (a + b * th[i]) * (T - T_prev)) / (1.0 + w0p * T_prev)
            else:
                s = (xv / T - a) / b
                if s <= -1.0 + 1e-12:
                    guess = xv - (a - b) * T
                elif s >= 1.0 - 1e-12:
                    guess = xv - (a + b) * T
                else:
                    guess = math.atanh(s)
            y, tt, ok = _foot_point(xv, T, a, b, guess, tol, maxiter)
            if not ok:
                return -(2 + i)
            x0[i] = y
            th[i] = tt
            s2 = 1.0 - tt * tt
            w0p = b * s2
            jac = 1.0 + w0p * T
            rr = math.sqrt((a + b * tt) / 3.0)
            wx = w0p / jac
            wxx = -2.0 * b * tt * s2 / (jac * jac * jac)
            R[i] = rr
            R1[i] = wx / (6.0 * rr)
            r2 = wxx / (6.0 * rr) - wx * wx / (36.0 * rr * rr * rr)
        else:
            R[i] = m
            R1[i] = 0.0
            r2 = 0.0
        v = U[i] + (R[i] - m)
        value[i] = v
        F[i] = 3.0 * (v * v - U[i] * U[i]) * U1[i] + 3.0 * (v * v - R[i] * R[i]) * R1[i] - mu * r2
    return -1


@njit(cache=True)
def trapezoid_pair(phi, wU1, U1, h):
    """Trapezoid sums of phi w(U) U' and of U' (the shock mass on the grid)."""
    n = phi.size
    s = 0.0
    mass = 0.0
    for i in range(n):
        wt = 0.5 if (i == 0 or i == n - 1) else 1.0
        s += wt * phi[i] * wU1[i]
        mass += wt * U1[i]
    return s * h, mass * h


@njit(cache=True)
def perturbation_stage(phi0, phi1, value, base, Xdot, U1, R1, F, dt, alpha, beta,
                       h, mu, sigma, second_order, flux, tmp, k, out):
    """out = alpha phi0 + beta (phi1 + dt g(phi1)), with zero boundary values, where
    g(phi) = L_h(value + phi) - base - Xdot (U1 + R1) - F."""
    n = phi1.size
    for i in range(n):
        tmp[i] = value[i] + phi1[i]
    llf_rhs(tmp, h, mu, sigma, second_order, flux, k)
    out[0] = 0.0
    out[n - 1] = 0.0
    for i in range(1, n - 1):
        g = k[i] - base[i] - Xdot * (U1[i] + R1[i]) - F[i]
        out[i] = alpha * phi0[i] + beta * (phi1[i] + dt * g)
    return out
