"""Acceptance checks shared by the command-line suite and the test suite.

Every function returns a list of ``CheckResult`` rows.  Long PDE checks accept
shortened end times; a shortened run that passes is reported INCONCLUSIVE since
it does not exercise the stated scale.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .ansatz import build_composite_ansatz
from .diagnostics import (INTERACTION_NAMES, INTERACTION_TARGETS, contraction_monitor,
                          convergence_metrics, energy_breakdown, interaction_integrals)
from .solver import (Grid, PerturbationSpec, SchemeConfig, initial_data, manufactured_convergence,
                     maximum_principle_excursion, run, steady_shock_drift)
from .waves import (WaveParameters, build_approx_rarefaction, build_shock_profile,
                    rarefaction_decay_report, rarefaction_norms, rarefaction_sup_gap,
                    shock_tail_bounds)
from .weight import (WeightFunction, junction_fd_jumps, junction_mismatch, poincare_check,
                     random_band_limited, weight_algebra)

log = logging.getLogger(__name__)

STATUSES = ("PASS", "FAIL", "SKIPPED", "INCONCLUSIVE")
DECAY_MIN_R2 = 0.98      # wave decay-law fits; the interaction fits use 0.95


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    status: str
    value: float
    threshold: str
    detail: str = ""
    seconds: float = 0.0

    @property
    def line(self):
        return (f"{self.status:<12} [{self.criterion:>2}] {self.name}: value={self.value:.6g} "
                f"({self.threshold}) {self.detail}".rstrip())


def _status(ok):
    return "PASS" if ok else "FAIL"


def _timed(fn, *args, **kw):
    start = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - start


def default_params(u_plus=1.2):
    return WaveParameters(-2.0, u_plus, 1.0)


# ---------------------------------------------------------------- 1: profile

def profile_checks(params=None):
    params = params or WaveParameters(-2.0, 1.0, 1.0)
    start = time.perf_counter()
    shock = build_shock_profile(params)
    xi = np.linspace(-50.0, 5000.0, 1000)
    U, dU, _ = shock.evaluate(xi)
    res = float(np.max(np.abs(params.mu * dU - (U - params.u_minus) * (U - params.u_mid) ** 2)))
    right = shock_tail_bounds(shock, "right")
    left = shock_tail_bounds(shock, "left")
    secs = time.perf_counter() - start
    rate = shock.rate
    return [
        CheckResult(1, "profile ODE residual", _status(res < 1e-9), res, "< 1e-9"),
        CheckResult(1, "right tail algebraic order", _status(abs(right.exponent - 1) <= 0.1),
                    right.exponent, "1.0 +/- 0.1", f"R2={right.r_squared:.6f}"),
        CheckResult(1, "left tail exponential rate", _status(abs(left.exponent / rate - 1) <= 0.1),
                    left.exponent, f"{rate:g} +/- 10%", f"R2={left.r_squared:.6f}"),
        CheckResult(1, "profile runtime", _status(secs < 5), secs, "< 5 s", seconds=secs),
    ]


# ---------------------------------------------------------------- 2, 3: rarefaction

def rarefaction_checks(params=None, times=None):
    params = params or default_params()
    if params.delta_R == 0:
        return [CheckResult(c, n, "SKIPPED", float("nan"), "not applicable: delta_R = 0")
                for c, n in ((2, "rarefaction decay"), (3, "approximate vs exact fan"))]
    times = np.geomspace(10, 1e4, 13) if times is None else np.asarray(times, float)
    start = time.perf_counter()
    r = build_approx_rarefaction(params)
    rep = rarefaction_decay_report(r, times, (1.0, 2.0, np.inf))
    l1_err = float(np.max(np.abs(rep.ux_norms[1.0] - params.delta_R)))
    secs = time.perf_counter() - start
    f_inf, f_2 = rep.ux_fits[np.inf], rep.ux_fits[2.0]
    s_inf, s_2 = f_inf.slope, f_2.slope
    gap_early = rarefaction_sup_gap(r, 10.0)
    gap_late = rarefaction_sup_gap(r, 1e4)
    ratio = gap_late / gap_early
    return [
        CheckResult(2, "rarefaction Linf slope",
                    _status(abs(s_inf + 1) <= 0.1 and f_inf.r_squared >= DECAY_MIN_R2), s_inf,
                    f"-1 +/- 0.1, R2 >= {DECAY_MIN_R2}", f"R2={f_inf.r_squared:.4f}"),
        CheckResult(2, "rarefaction L2 slope",
                    _status(abs(s_2 + 0.5) <= 0.1 and f_2.r_squared >= DECAY_MIN_R2), s_2,
                    f"-0.5 +/- 0.1, R2 >= {DECAY_MIN_R2}", f"R2={f_2.r_squared:.4f}"),
        CheckResult(2, "rarefaction L1 mass", _status(l1_err <= 1e-8), l1_err, "|L1 - delta_R| <= 1e-8"),
        CheckResult(2, "rarefaction runtime", _status(secs < 10), secs, "< 10 s", seconds=secs),
        CheckResult(3, "approximate vs exact fan", _status(ratio < 0.01), ratio,
                    "gap(1e4) / gap(10) < 0.01", f"gap(10)={gap_early:.3e}"),
    ]


# ---------------------------------------------------------------- 4, 5: weight

def weight_checks(params=None):
    params = params or default_params()
    wf = WeightFunction(params)
    rep, secs = _timed(weight_algebra, wf)
    m = params.u_mid
    jumps = dict(junction_mismatch(wf))
    jumps.update(junction_fd_jumps(wf))
    worst_jump = max(jumps.values())
    interior = (rep.u > params.u_minus) & np.isfinite(rep.poincare_factor)
    pf_min = float(np.min(rep.poincare_factor[interior]))
    pf_bad = [c for c in rep.counterexamples if "poincare" in c[0]]
    return [
        CheckResult(4, "H1+H2 two-way agreement", _status(rep.max_rel_discrepancy < 1e-8),
                    rep.max_rel_discrepancy, "< 1e-8 relative"),
        CheckResult(4, "min H1+H2", _status(rep.sum.min() > 2 * m**4), float(rep.sum.min()),
                    f"> {2 * m**4:g}"),
        CheckResult(4, "weighted Poincare factor", _status(not pf_bad and pf_min > 1 / 6), pf_min,
                    "> 1/6 on (u_minus, u_star)"),
        CheckResult(4, "weight C2 junctions", _status(worst_jump < 1e-6), worst_jump, "< 1e-6"),
        CheckResult(4, "weight runtime", _status(secs < 2), secs, "< 2 s", seconds=secs),
    ]


def poincare_checks(n_random=1000, seed=0):
    lin = poincare_check(lambda y: y, lambda y: np.ones_like(y))
    gap = abs(lin.lhs - lin.rhs)
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(n_random):
        f, df = random_band_limited(rng)
        if not poincare_check(f, df).satisfied:
            violations += 1
    return [
        CheckResult(5, "Poincare equality f(y)=y", _status(gap <= lin.error_bound), gap,
                    f"<= quadrature bound {lin.error_bound:.2e}", f"lhs={lin.lhs:.15f}"),
        CheckResult(5, "Poincare random functions", _status(violations == 0), violations,
                    f"0 violations of {n_random}"),
    ]


# ---------------------------------------------------------------- 6: interactions

def interaction_checks(params=None, times=None):
    params = params or default_params()
    if params.delta_R == 0:
        return [CheckResult(6, "interaction decay", "SKIPPED", float("nan"),
                            "not applicable: delta_R = 0")]
    times = np.geomspace(1e2, 1e4, 9) if times is None else np.asarray(times, float)
    rep, secs = _timed(interaction_integrals, params, times)
    out = []
    for k in INTERACTION_NAMES:
        fit = rep.fits[k]
        target = INTERACTION_TARGETS[k]
        if target is None:
            # the log-corrected fan term has no graded exponent; its fit goes to the CSV only
            continue
        ok = abs(fit.exponent - target) <= 0.1 and fit.r_squared >= 0.95
        out.append(CheckResult(6, f"decay {k}", _status(ok), fit.exponent,
                               f"{target:g} +/- 0.1, R2 >= 0.95", f"R2={fit.r_squared:.4f}"))
    out.append(CheckResult(6, "interaction runtime", _status(secs < 60), secs, "< 60 s", seconds=secs))
    return out


# ---------------------------------------------------------------- 7, 8: evolution

def contraction_checks(end_time=200.0, output_every=0.5, grid=None):
    params = WaveParameters(-2.0, 1.0, 1.0)
    grid = grid or Grid()
    cfg = SchemeConfig(end_time=end_time, output_every=output_every)
    tr, secs = _timed(run, PerturbationSpec("gaussian", 0.1), cfg, params, grid,
                      sample_hook=energy_breakdown)
    v = contraction_monitor(tr.breakdowns, params.u_mid, pure_shock=True)
    full = end_time >= 200 and grid.n >= 12000
    ok_status = "PASS" if full else "INCONCLUSIVE"
    return [
        CheckResult(7, "pure-shock energy non-increasing", ok_status if v.energy_monotone else "FAIL",
                    v.energy_max_increase, "relative increase <= 1e-8 per sample",
                    f"{len(tr.breakdowns)} samples to t={tr.times[-1]:g}"),
        CheckResult(7, "lemma lower bound on the shock good term",
                    ok_status if v.lemma_holds else "FAIL", v.lemma_min_margin,
                    "relative margin >= 0 at every sample"),
        CheckResult(7, "pure-shock runtime", ok_status if secs < 600 else "FAIL", secs,
                    "< 600 s", seconds=secs),
    ]


def _monotone_decreasing(values):
    values = np.asarray(values, float)
    return bool(np.all(np.diff(values) <= 0))


def trend_samples(times, end_time, n=25):
    """Indices of samples nearest to n log-spaced times in [sqrt(T), T]."""
    times = np.asarray(times, float)
    targets = np.geomspace(np.sqrt(end_time), end_time, n)
    idx = np.unique([int(np.argmin(np.abs(times - s))) for s in targets])
    return idx


def composite_trend_checks(end_time=500.0, output_every=1.0, grid=None, u_plus=1.1):
    params = WaveParameters(-2.0, u_plus, 1.0)
    grid = grid or Grid()
    cfg = SchemeConfig(end_time=end_time, output_every=output_every)
    tr, secs = _timed(run, PerturbationSpec("gaussian", 0.05), cfg, params, grid)
    cm = convergence_metrics(tr, build_shock_profile(params), params)
    idx = trend_samples(cm.t, tr.times[-1])
    series = {
        "sup-norm error": cm.sup_error[idx],
        "|X'|": np.abs(cm.Xdot[idx]),
        "|X|/t": np.abs(cm.X_over_t[idx]),
    }
    full = end_time >= 500 and grid.n >= 12000
    out = []
    for name, vals in series.items():
        mono = _monotone_decreasing(vals)
        worst = float(np.max(np.diff(vals))) if vals.size > 1 else 0.0
        status = ("PASS" if full else "INCONCLUSIVE") if mono else "FAIL"
        out.append(CheckResult(8, f"{name} decreasing over final log-half", status, worst,
                               "max consecutive change <= 0", f"{vals.size} log-spaced samples"))
    sup = cm.sup_error[np.isfinite(cm.sup_error)]
    frac = float(sup[-1] / sup.max())
    out.append(CheckResult(8, "final sup-norm error vs peak",
                           ("PASS" if full else "INCONCLUSIVE") if frac < 0.2 else "FAIL",
                           frac, "< 0.2", f"run took {secs:.0f} s", seconds=secs))
    return out


# ---------------------------------------------------------------- 9, 10: scheme

def scheme_checks(grid=None, steps=1000):
    grid = grid or Grid()
    study, secs = _timed(manufactured_convergence)
    out = [CheckResult(9, "manufactured-solution spatial order", _status(study.observed_order >= 1.9),
                       study.observed_order, ">= 1.9",
                       "errors " + ", ".join(f"{e:.2e}" for e in study.errors), seconds=secs)]
    params = WaveParameters(-2.0, 1.0, 1.0)
    bound = 10 * grid.h**2
    for form in ("conservative", "perturbation"):
        err, xdot = steady_shock_drift(params, grid, steps, formulation=form)
        out.append(CheckResult(9, f"steady shock preserved ({form})", _status(err <= bound), err,
                               f"<= 10 h^2 = {bound:.3g}", f"max |X'| = {xdot:.2e}"))
    worst = 0.0
    ansatz = build_composite_ansatz(WaveParameters(-2.0, 1.2, 1.0))
    for spec in (PerturbationSpec("gaussian", 0.1), PerturbationSpec("noise", 0.2, seed=3)):
        p = ansatz.params
        u0 = initial_data(spec, grid, ansatz)
        worst = max(worst, maximum_principle_excursion(u0, grid, p, t_end=2.0))
    out.append(CheckResult(9, "discrete maximum principle", _status(worst <= 1e-10), worst,
                           "excursion <= 1e-10"))
    return out


def shift_identification_checks(a=2.0, end_time=100.0, grid=None):
    params = WaveParameters(-2.0, 1.0, 1.0)
    grid = grid or Grid()
    cfg = SchemeConfig(end_time=end_time, output_every=max(end_time / 20, 0.5))
    tr = run(PerturbationSpec("translate", shift_a=a), cfg, params, grid)
    # phi = u - U(xi + X), so u0 = U(xi + a) is the ansatz itself at X = a
    err = abs(tr.X[-1] - a)
    return [CheckResult(10, "shift identifies translation", _status(err <= 5 * grid.h), err,
                        f"|X(T) - a| <= 5 h = {5 * grid.h:g}", f"X(T)={tr.X[-1]:.6f}, a={a:g}")]


ALL_CHECKS = (
    ("profile", profile_checks),
    ("rarefaction", rarefaction_checks),
    ("weight", weight_checks),
    ("poincare", poincare_checks),
    ("interactions", interaction_checks),
    ("scheme", scheme_checks),
    ("shift", shift_identification_checks),
    ("contraction", contraction_checks),
    ("composite", composite_trend_checks),
)
