"""Shifted composite wave, its source term and the shift ODE.

In the shock frame xi = x - sigma t the ansatz is

    u~^X(t, xi) = U(xi + X) + u^R(1 + t, xi + sigma t + X) - u_mid,

and it satisfies u~_t - sigma u~_xi + f(u~)_xi - mu u~_xixi = X' (U' + u^R_xi) + F
with the interaction source F = [f(u~) - f(u^R) - f(U)]_xi - mu u^R_xixi.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, NumericalError
from .waves import build_approx_rarefaction, build_shock_profile

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnsatzFields:
    """Wave components on a set of points, plus the warm-start data of the root solves."""

    U: np.ndarray
    U1: np.ndarray
    U2: np.ndarray
    R: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    q: np.ndarray = None
    x0: np.ndarray = None

    @property
    def value(self):
        return self.U + (self.R - self._u_mid)

    _u_mid: float = 0.0


@dataclass(frozen=True)
class CompositeAnsatz:
    """u^S(xi + X) + u^R(1 + t, xi + sigma t + X) - u_mid.

    Either wave may be absent: ``shock=None`` freezes u^S at u_mid (pure
    rarefaction test mode) and ``rarefaction=None`` freezes u^R at u_mid.
    """

    params: object
    shock: object = None
    rarefaction: object = None

    def fields(self, t, xi, X, q_guess=None, x0_guess=None):
        if t < 0:
            raise ValueError("ansatz needs t >= 0")
        xi = np.asarray(xi, float)
        m = self.params.u_mid
        zeros = np.zeros_like(xi)
        if self.shock is not None:
            q = self.shock.logit(xi + X, q_guess)
            U, U1, U2 = self.shock.from_logit(q)
        else:
            q, U, U1, U2 = None, np.full_like(xi, m), zeros, zeros
        if self.rarefaction is not None:
            x = xi + self.params.sigma * t + X
            rf = self.rarefaction.fields(1.0 + t, x, x0_guess)
            x0, R, R1, R2 = rf.x0, rf.u, rf.u_x, rf.u_xx
        else:
            x0, R, R1, R2 = None, np.full_like(xi, m), zeros, zeros
        return AnsatzFields(U, U1, U2, R, R1, R2, q, x0, m)

    def eval(self, t, xi, X):
        f = self.fields(t, xi, X)
        return f.value, f.U1 + f.R1, f.U2 + f.R2


def build_composite_ansatz(params, normalization=0.0, tolerance=1e-12):
    shock = build_shock_profile(params, normalization, tolerance)
    rare = build_approx_rarefaction(params, tolerance) if params.delta_R > 0 else None
    return CompositeAnsatz(params, shock, rare)


def ansatz_eval(a, t, xi, X):
    return a.eval(t, xi, X)


@dataclass(frozen=True)
class SourceTerm:
    """Interaction source F split into F1 (wave coupling) and F2 = -mu u^R_xixi."""

    ansatz: CompositeAnsatz

    def from_fields(self, f):
        mu = self.ansatz.params.mu
        ut = f.value
        fp = 3.0 * ut**2
        F1 = (fp - 3.0 * f.U**2) * f.U1 + (fp - 3.0 * f.R**2) * f.R1
        F2 = -mu * f.R2
        return F1 + F2, F1, F2

    def eval(self, t, xi, X):
        return self.from_fields(self.ansatz.fields(t, xi, X))

    def conservative_flux(self, t, xi, X):
        """f(u~) - f(u^R) - f(U), whose xi-derivative is F1."""
        f = self.ansatz.fields(t, xi, X)
        return f.value**3 - f.R**3 - f.U**3


def source_eval(s, t, xi, X):
    return s.eval(t, xi, X)


# ---------------------------------------------------------------- shift

def shift_gain(params):
    return 32.0 / (25.0 * params.u_mid**2)


def trapezoid(values, h):
    return h * (values.sum(axis=-1) - 0.5 * (values[..., 0] + values[..., -1]))


@dataclass(frozen=True)
class ShiftCoverage:
    mass_fraction: float     # int U' over the grid / delta_S
    tail_bound: float        # bound on the shift-rate contribution from outside the grid per unit |phi|


def shift_coverage(shock, wf, X, grid):
    """Fraction of the shock layer inside the grid and the neglected-tail bound.

    The neglected part of the shift integral is bounded by
    gain * sup|phi| * sup w * (U(xi_min + X) - u_minus + u_mid - U(xi_max + X)).
    """
    p = shock.params
    inside = float(shock.eval(grid.xi_max + X) - shock.eval(grid.xi_min + X))
    missing = float(shock.gap_left(grid.xi_min + X) + shock.gap_right(grid.xi_max + X))
    return ShiftCoverage(inside / p.delta_S, shift_gain(p) * wf.sup() * missing)


def shift_rhs(phi, shock, wf, X, grid, fields=None):
    """X' = 32/(25 u_m^2) int phi w(U(xi + X)) U'(xi + X) dxi by the trapezoid rule."""
    if fields is None:
        q = shock.logit(grid.nodes + X)
        U, U1, _ = shock.from_logit(q)
    else:
        U, U1 = fields.U, fields.U1
    mass = trapezoid(U1, grid.h)
    if mass < 0.99 * shock.params.delta_S:
        raise CoverageError(
            f"grid holds only {mass / shock.params.delta_S:.4f} of the shock mass at X={X}")
    phi = np.asarray(phi, float)
    if not np.all(np.isfinite(phi)):
        raise NumericalError("non-finite perturbation in shift integral")
    return shift_gain(shock.params) * trapezoid(phi * wf.eval(U) * U1, grid.h)


@dataclass
class ShiftState:
    """Shift X(t) with its rate; ``history`` holds (t, X, Xdot) rows."""

    t: float = 0.0
    X: float = 0.0
    Xdot: float = 0.0
    history: list = field(default_factory=list)

    def record(self):
        self.history.append((self.t, self.X, self.Xdot))

    def as_array(self):
        return np.array(self.history, float).reshape(-1, 3)


def advance_shift(state, Xdot, dt, record=True):
    """Explicit Euler update X <- X + dt Xdot.  Mutates and returns ``state``.

    With ``record=False`` the history is left alone, so long runs can record at
    their own cadence instead of every step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not np.isfinite(Xdot):
        raise NumericalError(f"non-finite shift rate {Xdot!r}")
    state.X += dt * Xdot
    state.t += dt
    state.Xdot = Xdot
    if record:
        state.history.append((state.t, state.X, Xdot))
    return state
