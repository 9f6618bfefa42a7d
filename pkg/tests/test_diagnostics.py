import numpy as np
import pytest
from scipy.integrate import quad

from oleinik_stability.ansatz import build_composite_ansatz
from oleinik_stability.diagnostics import (INTERACTION_NAMES, amplitude_sweep, contraction_monitor,
                                           convergence_metrics, energy_breakdown,
                                           energy_identity_residual, interaction_integrals,
                                           interaction_values, split_trapezoid, weighted_energy)
from oleinik_stability.solver import (Grid, PerturbationSpec, SchemeConfig, initial_data,
                                      initial_state, run)
from oleinik_stability.waves import (WaveParameters, build_approx_rarefaction,
                                     build_shock_profile, exact_rarefaction_eval)
from oleinik_stability.weight import WeightFunction

SMALL = Grid(-100.0, 200.0, 3000)


def _state(params, spec):
    a = build_composite_ansatz(params)
    wf = WeightFunction(params)
    u0 = initial_data(spec, SMALL, a)
    return initial_state(u0, SMALL, a, wf, SchemeConfig()), a, wf


def _hook(state, ansatz, wf):
    return energy_breakdown(state, ansatz, wf)


@pytest.fixture(scope="module")
def composite_state():
    return _state(WaveParameters(-2.0, 1.2), PerturbationSpec("gaussian", 0.1))


def test_weighted_energy_against_quadrature():
    p = WaveParameters(-2.0, 1.0)
    shock, wf = build_shock_profile(p), WeightFunction(p)
    g = Grid(-40, 60, 20000)
    phi = 0.1 * np.exp(-(g.nodes - 1.0) ** 2)
    oracle, _ = quad(lambda x: 0.01 * np.exp(-2 * (x - 1) ** 2) * float(wf.eval(shock.eval(x + 0.5))),
                     -40, 60, points=[1.0], limit=200)
    assert weighted_energy(phi, shock, wf, 0.5, g) == pytest.approx(oracle, rel=1e-7)
    with pytest.raises(ValueError):
        weighted_energy(phi[:-1], shock, wf, 0.5, g)


def test_split_trapezoid():
    h = 0.1
    x = np.arange(0, 101) * h
    v = 2 * x + 1
    left, right = split_trapezoid(v, x, h, 3.33)
    # trapezoid is exact on linear data
    assert left == pytest.approx(3.33**2 + 3.33, rel=1e-13)
    assert left + right == pytest.approx(110.0, rel=1e-13)
    assert split_trapezoid(v, x, h, -1.0) == (0.0, pytest.approx(110.0))
    assert split_trapezoid(v, x, h, 20.0) == (pytest.approx(110.0), 0.0)


def test_shock_split_adds_up(composite_state):
    b = energy_breakdown(*composite_state)
    assert b.GS1 + b.GS2 == pytest.approx(b.GS, rel=1e-13)


def test_good_bad_regrouping(composite_state):
    # X' Y + J_good + J_bad regroups GS + GR + GSR + N + J term by term
    b = energy_breakdown(*composite_state)
    lhs = b.Xdot * b.Y + b.J_good + b.J_bad
    assert lhs == pytest.approx(b.GS + b.GR + b.GSR + b.N + b.J, rel=1e-12)


def test_zero_perturbation_annihilates_everything():
    state, a, wf = _state(WaveParameters(-2.0, 1.2), PerturbationSpec("zero"))
    # the compiled and reference ansatz agree to ~1e-13, so zero phi explicitly
    state.phi = np.zeros_like(state.phi)
    state.shift.Xdot = 0.0
    b = energy_breakdown(state, a, wf)
    for name in ("E_w", "GS", "GR", "GSR", "N", "J", "Y", "Fterm", "GS1", "GS2", "J_good", "J_bad"):
        assert getattr(b, name) == 0.0, name


def test_pure_shock_has_no_rarefaction_terms():
    b = energy_breakdown(*_state(WaveParameters(-2.0, 1.0), PerturbationSpec("gaussian", 0.1)))
    assert b.GR == 0.0 and b.GSR == 0.0 and b.J == 0.0 and b.Fterm == 0.0
    assert b.E_w > 0 and b.GS > 0


def test_breakdown_row_layout(composite_state):
    b = energy_breakdown(*composite_state)
    assert len(b.row()) == len(b.names())
    assert b.names()[:2] == ["t", "E_w"]
    assert b.phi_sup == pytest.approx(0.1)


def test_lemma_and_monotone_energy_for_pure_shock():
    p = WaveParameters(-2.0, 1.0)
    tr = run(PerturbationSpec("gaussian", 0.1), SchemeConfig(end_time=1.0, output_every=0.1),
             p, SMALL, sample_hook=_hook)
    v = contraction_monitor(tr.breakdowns, p.u_mid)
    assert v.lemma_holds and v.lemma_min_margin > 0
    assert v.energy_monotone and v.energy_failures == []
    mixed = contraction_monitor(tr.breakdowns, p.u_mid, pure_shock=False)
    assert mixed.energy_monotone is None


def test_contraction_monitor_flags_increase():
    p = WaveParameters(-2.0, 1.0)
    tr = run(PerturbationSpec("gaussian", 0.1), SchemeConfig(end_time=0.2, output_every=0.1),
             p, SMALL, sample_hook=_hook)
    b = list(tr.breakdowns)
    b[2] = type(b[2])(**{**b[2].__dict__, "E_w": 2 * b[0].E_w})
    v = contraction_monitor(b, p.u_mid)
    assert not v.energy_monotone and v.energy_failures == [b[2].t]


def test_energy_identity_residual_shrinks_with_grid():
    # the identity holds for the PDE; on the grid the residual is discretisation error
    p = WaveParameters(-2.0, 1.0)
    ratios = []
    for n in (1500, 3000, 6000):
        tr = run(PerturbationSpec("gaussian", 0.1),
                 SchemeConfig(end_time=1.6, output_every=0.025), p, Grid(-100, 200, n),
                 sample_hook=_hook)
        t, r = energy_identity_residual(tr.breakdowns)
        half_de = 0.5 * np.gradient([b.E_w for b in tr.breakdowns], t)
        k = (t >= 0.5 - 1e-9) & (t <= 1.5 + 1e-9)
        ratios.append(np.abs(r[k]).max() / np.abs(half_de[k]).max())
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] < 0.05


def test_convergence_metrics_for_exact_shock():
    p = WaveParameters(-2.0, 1.0)
    tr = run(PerturbationSpec("zero"), SchemeConfig(end_time=0.5, output_every=0.25), p, SMALL)
    cm = convergence_metrics(tr, build_shock_profile(p), p)
    assert np.all(cm.sup_error <= 1e-14)
    assert np.isnan(cm.X_over_t[0]) and np.all(np.abs(cm.Xdot) <= 1e-14)


def test_convergence_metrics_skip_t0_with_fan():
    p = WaveParameters(-2.0, 1.2)
    tr = run(PerturbationSpec("zero"), SchemeConfig(end_time=0.5, output_every=0.5), p, SMALL)
    cm = convergence_metrics(tr, build_shock_profile(p), p)
    assert np.isnan(cm.sup_error[0]) and np.isfinite(cm.sup_error[1])


def test_interaction_values_against_fine_trapezoid():
    p = WaveParameters(-2.0, 1.2)
    s, r = build_shock_profile(p), build_approx_rarefaction(p)
    t = 10.0
    T = 1 + t
    L = (p.lambda_plus - p.sigma) * T
    got = interaction_values(s, r, p, t)

    def tz(f, a, b, n=2_000_001):
        x = np.linspace(a, b, n)
        return np.trapezoid(f(x), x)

    def uR(x):
        return r.eval(T, x + p.sigma * t)

    def fan(x):
        return exact_rarefaction_eval(p, T, x + p.sigma * T)

    far = L + 1e4
    oracle = {
        "shock_gap_rare_slope_left": tz(lambda x: np.abs(s.eval(x) - 1) * r.eval_x(T, x + 3 * t), -300, 0),
        "shock_gap_rare_slope_right": tz(lambda x: np.abs(s.eval(x) - 1) * r.eval_x(T, x + 3 * t), 0, 400),
        "rare_gap_shock_slope_left": tz(lambda x: np.abs(uR(x) - 1) * s.eval_deriv(x), -300, 0),
        "approx_fan_gap_shock_slope": tz(lambda x: np.abs(uR(x) - fan(x)) * s.eval_deriv(x), 0, L),
        "fan_gap_shock_slope": tz(lambda x: np.abs(fan(x) - 1) * s.eval_deriv(x), 0, L),
        # beyond `far` the rarefaction sits at u_plus, so the tail is 0.2 (1 - U(far))
        "rare_gap_shock_slope_far": (tz(lambda x: np.abs(uR(x) - 1) * s.eval_deriv(x), L, far, 4_000_001)
                                     + 0.2 * (1 - float(s.eval(far)))),
    }
    assert set(got) == set(INTERACTION_NAMES)
    for k in INTERACTION_NAMES:
        assert got[k] == pytest.approx(oracle[k], rel=1e-7), k


def test_interaction_fits_need_two_decades():
    with pytest.raises(ValueError):
        interaction_integrals(WaveParameters(-2.0, 1.2), [1.0, 2.0, 10.0])


def test_interaction_fit_report():
    rep = interaction_integrals(WaveParameters(-2.0, 1.2), np.geomspace(10, 1e4, 8))
    far = rep.fits["rare_gap_shock_slope_far"]
    assert far.conclusive and far.exponent == pytest.approx(-1.0, abs=0.05)
    assert len(rep.table()) == len(INTERACTION_NAMES)
    assert rep.log_corrected.r_squared > 0.95


def test_amplitude_sweep_classifies_outcomes():
    p = WaveParameters(-2.0, 1.0)
    # far left U is near -2, so a 0.5 bump there crosses a 2.2 threshold
    cfg = SchemeConfig(end_time=5.0, output_every=0.5, blowup_threshold=2.2)
    rows = amplitude_sweep(p, [-0.01, -0.5], cfg, SMALL, base=PerturbationSpec("gaussian", center=-20.0))
    assert [r.outcome for r in rows] == ["settled", "blow_up"]
    assert rows[0].final_sup_error < 0.2 * rows[0].peak_sup_error
    assert rows[0].t_final == pytest.approx(5.0)
    assert np.isnan(rows[1].peak_sup_error)
