"""Energy functionals, contraction checks, wave-interaction integrals and convergence series.

Every functional is an integral over the real line of an expression in the
unshifted frame, e.g. int phi(t, xi - X)^2 w(U(xi)) dxi.  Substituting
xi -> xi + X turns it into an integral over the solver grid with the waves
evaluated at the shifted position, which is what is computed here: phi stays
on its nodes and no interpolation is needed.
"""

from dataclasses import asdict, dataclass, fields, replace

import numpy as np
from scipy.integrate import quad

from .ansatz import SourceTerm, shift_gain, trapezoid
from .errors import BlowUpError, CoverageError, FitQualityError, NumericalError
from .fitting import fit_log_corrected, fit_power_law
from .waves import exact_rarefaction_eval
from .weight import weight_eval


def weighted_energy(phi, shock, wf, X, grid):
    """int phi^2 w(U(xi + X)) dxi on the grid."""
    phi = np.asarray(phi, float)
    if phi.shape != (grid.n + 1,):
        raise ValueError(f"phi has shape {phi.shape}, grid has {grid.n + 1} nodes")
    return float(trapezoid(phi * phi * wf.eval(shock.eval(grid.nodes + X)), grid.h))


def split_trapezoid(values, nodes, h, s):
    """Trapezoid integrals left and right of ``s``; the two parts sum to the full rule."""
    full = float(trapezoid(values, h))
    if s <= nodes[0]:
        return 0.0, full
    if s >= nodes[-1]:
        return full, 0.0
    k = int(np.floor((s - nodes[0]) / h))
    k = min(max(k, 0), nodes.size - 2)
    left = float(trapezoid(values[:k + 1], h)) if k > 0 else 0.0
    theta = (s - nodes[k]) / h
    vs = values[k] + theta * (values[k + 1] - values[k])
    left += 0.5 * theta * h * (values[k] + vs)
    return left, full - left


@dataclass(frozen=True)
class EnergyBreakdown:
    t: float
    E_w: float
    GS: float
    GR: float
    GSR: float
    N: float
    J: float
    Y: float
    Fterm: float
    GS1: float
    GS2: float
    dissipation: float
    Xdot: float
    X: float
    J_good: float
    J_bad: float
    dissipation_unweighted: float
    phi_sq_shock: float
    quartic: float
    phi_l2: float
    phi_xi_l2: float
    phi_xixi_l2: float
    phi_sup: float

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return [getattr(self, n) for n in self.names()]

    def lemma_rhs(self, u_m):
        """Lower bound on GS claimed by the weighted-Poincare lemma."""
        return (5 / 16 * u_m**2 * self.dissipation_unweighted
                + 4 / 5 * u_m**3 * self.phi_sq_shock
                + 25 / 64 * u_m**2 * self.Xdot**2
                + 0.75 * self.quartic)


def energy_breakdown(state, ansatz, wf, source=None):
    """Evaluate every term of the weighted energy identity at the state's time."""
    p = ansatz.params
    grid = state.grid
    h, xi = grid.h, grid.nodes
    t, X, Xdot = state.t, state.shift.X, state.shift.Xdot
    phi = state.phi
    m, mu, sigma = p.u_mid, p.mu, p.sigma
    f = ansatz.fields(t, xi, X)
    U, U1, R, R1 = f.U, f.U1, f.R, f.R1
    w, w1, w2 = weight_eval(wf, U)
    source = source or SourceTerm(ansatz)
    F, _, _ = source.from_fields(f)
    dphi = np.gradient(phi, h, edge_order=2)
    d2phi = np.gradient(dphi, h, edge_order=2)

    def integ(v):
        return float(trapezoid(v, h))

    phi2 = phi * phi
    diss_density = mu * w * dphi**2
    b_density = phi2 * U1 * (sigma * w1 - 3 * U**2 * w1 + 3 * U * w - 0.5 * w2 * mu * U1)
    shift_density = phi * w * U1
    I_shock = integ(shift_density)
    quartic = integ(phi2 * phi2 * np.abs(w1) * U1)
    diss = integ(diss_density)
    B = integ(b_density)
    GS = diss + B + Xdot * I_shock + 0.75 * quartic
    GR = 3 * integ(phi2 * w * R * R1)
    GSR = 3 * integ(phi2 * w * (R - m) * U1) - 1.5 * integ(phi2 * (R - m) ** 2 * w1 * U1)
    I_rare = integ(phi * w * R1)
    I_w1 = integ(phi2 * w1 * U1)
    N = (Xdot * I_rare - 0.5 * Xdot * I_w1 + integ(phi2 * phi * w * (U1 + R1))
         - 2 * integ(phi2 * phi * (U + R - m) * w1 * U1)
         - 3 * integ(phi2 * (R - m) * U * w1 * U1))
    J = 3 * integ(phi2 * (U - m) * w * R1)
    Y = I_shock + I_rare - 0.5 * I_w1
    Fterm = -integ(F * phi * w)

    s = ansatz.shock.xi_star - X
    diss_l, diss_r = split_trapezoid(diss_density, xi, h, s)
    b_l, b_r = split_trapezoid(b_density, xi, h, s)
    shift_l, _ = split_trapezoid(shift_density, xi, h, s)
    corr = shift_gain(p) / 4 * shift_l**2          # 8 / (25 u_m^2) (...)^2
    GS1 = diss_l + b_l + corr
    GS2 = diss_r + b_r + Xdot * I_shock - corr + 0.75 * quartic

    J_good = (diss - 3 * integ(phi2 * U**2 * w1 * U1) + 3 * integ(phi2 * (R - m) * w * U1)
              + GR - 1.5 * integ(phi2 * (R - m) ** 2 * w1 * U1) + 0.75 * quartic)
    J_bad = (3 * integ(phi2 * w * U * U1) + J - 3 * integ(phi2 * (R - m) * U * w1 * U1)
             + sigma * I_w1 - 0.5 * integ(phi2 * mu * U1**2 * w2)
             + integ(phi2 * phi * w * (U1 + R1))
             - 2 * integ(phi2 * phi * (U + R - m) * w1 * U1))
    return EnergyBreakdown(
        t=t, E_w=integ(phi2 * w), GS=GS, GR=GR, GSR=GSR, N=N, J=J, Y=Y, Fterm=Fterm,
        GS1=GS1, GS2=GS2, dissipation=diss, Xdot=Xdot, X=X, J_good=J_good, J_bad=J_bad,
        dissipation_unweighted=integ(mu * dphi**2), phi_sq_shock=integ(phi2 * U1),
        quartic=quartic, phi_l2=np.sqrt(integ(phi2)), phi_xi_l2=np.sqrt(integ(dphi**2)),
        phi_xixi_l2=np.sqrt(integ(d2phi**2)), phi_sup=float(np.abs(phi).max()))


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class ContractionVerdict:
    lemma_holds: bool
    lemma_min_margin: float        # min over samples of GS - bound, relative to max(GS, tiny)
    lemma_failures: list           # sample times where the bound fails
    energy_monotone: bool          # None when the run has a rarefaction
    energy_max_increase: float     # largest relative increase between samples
    energy_failures: list


def contraction_monitor(breakdowns, u_m, pure_shock=True, slack=1e-8):
    """Check the lemma lower bound at each sample and, for pure shocks, E_w monotonicity."""
    fails, margins = [], []
    for b in breakdowns:
        bound = b.lemma_rhs(u_m)
        margin = b.GS - bound
        scale = max(abs(b.GS), abs(bound), 1e-300)
        margins.append(margin / scale)
        if margin < -1e-12 * scale:
            fails.append(b.t)
    e = np.array([b.E_w for b in breakdowns])
    if pure_shock and e.size > 1:
        rel = (e[1:] - e[:-1]) / np.maximum(e[:-1], 1e-300)
        efails = [breakdowns[i + 1].t for i in np.flatnonzero(rel > slack)]
        mono, inc = not efails, float(rel.max())
    else:
        mono, inc, efails = None, float("nan"), []
    return ContractionVerdict(not fails, float(min(margins)) if margins else 0.0, fails,
                              mono, inc, efails)


def energy_identity_residual(breakdowns):
    """Residual of (1/2) dE/dt + X' Y + J_good + J_bad - F at interior samples.

    dE/dt uses centred differences of E_w (one-sided at the ends).
    """
    t = np.array([b.t for b in breakdowns])
    e = np.array([b.E_w for b in breakdowns])
    dedt = np.gradient(e, t)
    rhs = np.array([b.Xdot * b.Y + b.J_good + b.J_bad - b.Fterm for b in breakdowns])
    return t, 0.5 * dedt + rhs


@dataclass(frozen=True)
class ConvergenceSeries:
    t: np.ndarray
    sup_error: np.ndarray
    Xdot: np.ndarray
    X_over_t: np.ndarray


def convergence_metrics(traj, shock, params):
    """sup_xi |u - (U(xi + X) + u^r((xi + sigma t) / t) - u_mid)|, X' and X / t per sample.

    With no rarefaction the fan term is u_mid and t = 0 is allowed.
    """
    xi = traj.grid.nodes
    t = np.array(traj.times)
    sup = np.full(t.size, np.nan)
    for i, (ti, ui, Xi) in enumerate(zip(t, traj.u, traj.X)):
        if params.delta_R > 0:
            if ti <= 0:
                continue
            fan = exact_rarefaction_eval(params, ti, xi + params.sigma * ti)
        else:
            fan = params.u_mid
        sup[i] = np.abs(ui - (shock.eval(xi + Xi) + fan - params.u_mid)).max()
    X = np.array(traj.X)
    with np.errstate(divide="ignore", invalid="ignore"):
        xt = np.where(t > 0, X / t, np.nan)
    return ConvergenceSeries(t, sup, np.array(traj.Xdot), xt)


# ---------------------------------------------------------------- amplitude basin

@dataclass(frozen=True)
class BasinRow:
    amplitude: float
    outcome: str              # settled, not_settled, blow_up or coverage
    t_final: float
    peak_sup_error: float
    final_sup_error: float
    final_abs_Xdot: float


def amplitude_sweep(params, amplitudes, scheme, grid, base=None, settle_fraction=0.2,
                    budget_seconds=None):
    """Evolve one perturbation per amplitude and classify the outcome.

    No smallness threshold is known in closed form, so this only reports where
    runs settle (final sup error below ``settle_fraction`` of its peak), where
    they fail to, and where they blow up or push the shock off the grid.
    """
    from .solver import PerturbationSpec, run
    from .waves import build_shock_profile

    base = base or PerturbationSpec("gaussian")
    shock = build_shock_profile(params)
    rows = []
    for a in amplitudes:
        try:
            tr = run(replace(base, amplitude=float(a)), scheme, params, grid,
                     budget_seconds=budget_seconds)
        except (BlowUpError, CoverageError) as exc:
            nan = float("nan")
            rows.append(BasinRow(float(a), exc.status, nan, nan, nan, nan))
            continue
        cm = convergence_metrics(tr, shock, params)
        sup = cm.sup_error[np.isfinite(cm.sup_error)]
        peak, final = float(sup.max()), float(sup[-1])
        outcome = "settled" if final < settle_fraction * peak else "not_settled"
        rows.append(BasinRow(float(a), outcome, float(tr.times[-1]), peak, final,
                             abs(float(cm.Xdot[-1]))))
    return rows


# ---------------------------------------------------------------- interactions

INTERACTION_NAMES = (
    "shock_gap_rare_slope_left",     # int_{-inf}^0 |U - u_m| u^R_xi
    "shock_gap_rare_slope_right",    # int_0^inf |U - u_m| u^R_xi
    "rare_gap_shock_slope_left",     # int_{-inf}^0 |u^R - u_m| U'
    "approx_fan_gap_shock_slope",    # int_0^L |u^R - u^r| U'
    "fan_gap_shock_slope",           # int_0^L |u^r - u_m| U'
    "rare_gap_shock_slope_far",      # int_L^inf |u^R - u_m| U'
)

INTERACTION_TARGETS = {
    "shock_gap_rare_slope_left": -0.8,
    "shock_gap_rare_slope_right": -0.8,
    "rare_gap_shock_slope_left": -0.8,
    "approx_fan_gap_shock_slope": -0.8,
    "fan_gap_shock_slope": None,      # power law with a log factor, fitted separately
    "rare_gap_shock_slope_far": -1.0,
}


@dataclass(frozen=True)
class InteractionFit:
    name: str
    exponent: float
    prefactor: float
    r_squared: float
    target: float
    conclusive: bool


@dataclass(frozen=True)
class InteractionReport:
    times: np.ndarray
    values: dict
    fits: dict
    log_corrected: object

    def table(self):
        return [(f.name, f.exponent, f.prefactor, f.r_squared) for f in self.fits.values()]


def _quad(fun, a, b, rtol=1e-10):
    val, err = quad(fun, a, b, limit=500, epsabs=0.0, epsrel=rtol)
    if err > 1e-7 * max(abs(val), 1e-300):
        val, err = quad(fun, a, b, limit=5000, epsabs=0.0, epsrel=rtol)
        if err > 1e-7 * max(abs(val), 1e-300):
            raise NumericalError(f"quadrature on [{a}, {b}] did not converge (err={err:.2e})")
    return val


def interaction_values(shock, rare, params, t):
    """The six interaction integrals at one time, with u^R = u^R(1 + t, xi + sigma t)."""
    m, sigma = params.u_mid, params.sigma
    T = 1.0 + t
    L = (params.lambda_plus - sigma) * T
    edge = params.lambda_minus * T - sigma * t      # left fan edge in the shock frame

    def rare_f(x):
        return rare.fields(T, np.array([x + sigma * t]))

    def fan(x):
        return float(exact_rarefaction_eval(params, T, x + sigma * T))

    def shock_gap_rare_slope(x):
        return abs(float(shock.eval(x)) - m) * float(rare_f(x).u_x[0])

    def rare_gap_shock_slope(x):
        return abs(float(rare_f(x).u[0]) - m) * float(shock.eval_deriv(x))

    def approx_gap(x):
        return abs(float(rare_f(x).u[0]) - fan(x)) * float(shock.eval_deriv(x))

    def fan_gap(x):
        return abs(fan(x) - m) * float(shock.eval_deriv(x))

    def pieces(fun, a, b, cuts):
        pts = [a] + sorted(c for c in cuts if a < c < b) + [b]
        return sum(_quad(fun, lo, hi) for lo, hi in zip(pts[:-1], pts[1:]))

    right_edge = edge + L
    cuts = [edge, right_edge, 1.0, 10.0]
    return {
        "shock_gap_rare_slope_left": pieces(shock_gap_rare_slope, -np.inf, 0.0, [-1.0]),
        "shock_gap_rare_slope_right": pieces(shock_gap_rare_slope, 0.0, np.inf, cuts),
        "rare_gap_shock_slope_left": pieces(rare_gap_shock_slope, -np.inf, 0.0, [-1.0]),
        "approx_fan_gap_shock_slope": pieces(approx_gap, 0.0, L, cuts),
        "fan_gap_shock_slope": pieces(fan_gap, 0.0, L, cuts),
        "rare_gap_shock_slope_far": pieces(rare_gap_shock_slope, L, np.inf, [right_edge, L + 10]),
    }


def interaction_integrals(params, times, shock=None, rare=None, min_r2=0.95):
    """Interaction integrals over ``times`` with log-log decay fits in 1 + t."""
    from .waves import build_approx_rarefaction, build_shock_profile

    times = np.asarray(times, float)
    if times.size < 3 or times.max() / times.min() < 100:
        raise ValueError("interaction fits need >= 3 times spanning at least two decades")
    shock = shock or build_shock_profile(params)
    rare = rare or build_approx_rarefaction(params)
    rows = [interaction_values(shock, rare, params, t) for t in times]
    values = {k: np.array([r[k] for r in rows]) for k in INTERACTION_NAMES}
    fits = {}
    for k in INTERACTION_NAMES:
        try:
            fr = fit_power_law(1.0 + times, values[k])
        except FitQualityError:
            fits[k] = InteractionFit(k, float("nan"), float("nan"), 0.0,
                                     INTERACTION_TARGETS[k], False)
            continue
        fits[k] = InteractionFit(k, fr.slope, fr.prefactor, fr.r_squared,
                                 INTERACTION_TARGETS[k], fr.r_squared >= min_r2)
    log_fit = fit_log_corrected(1.0 + times, values["fan_gap_shock_slope"])
    return InteractionReport(times, values, fits, log_fit)


def breakdown_dict(b):
    return asdict(b)
