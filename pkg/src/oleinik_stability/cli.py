"""Command-line experiment runner.

    oleinik-lab --kind weight_algebra --out runs/weight
    oleinik-lab --config experiment.json --kind theorem_suite --budget-seconds 600

Exit codes: 0 every check passed (or was skipped / inconclusive), 1 a check
failed, 2 invalid configuration, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import checks
from .artifacts import RunWriter, line_plot
from .diagnostics import (BasinRow, EnergyBreakdown, amplitude_sweep, contraction_monitor,
                          convergence_metrics, energy_breakdown, interaction_integrals,
                          INTERACTION_NAMES)
from .errors import ConfigurationError, NumericalError, OleinikError
from .solver import Grid, PerturbationSpec, SchemeConfig, run
from .waves import (WaveParameters, build_approx_rarefaction, build_shock_profile,
                    rarefaction_decay_report, shock_tail_bounds)
from .weight import WeightFunction, poincare_check, random_band_limited, weight_algebra

log = logging.getLogger(__name__)

KINDS = ("profile", "rarefaction", "weight_algebra", "poincare", "interactions", "evolve",
         "theorem_suite")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one run.  Serialised verbatim into the manifest."""

    kind: str = "theorem_suite"
    waves: dict = field(default_factory=lambda: {"u_minus": -2.0, "u_plus": 1.2, "mu": 1.0})
    grid: dict = field(default_factory=dict)
    scheme: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out: str = "runs/out"
    seed: int = 0
    budget_seconds: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        # Building every component validates the whole configuration up front.
        self.params()
        self.grid_obj()
        self.scheme_obj()
        self.perturbation_obj()
        if self.budget_seconds is not None and not self.budget_seconds > 0:
            raise ConfigurationError("budget_seconds must be positive")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigurationError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigurationError("config must be a JSON object")
        return cls.from_dict(d)

    def _build(self, kind, cls, kw):
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigurationError(f"bad {kind} settings: {exc}") from exc

    def params(self):
        return self._build("waves", WaveParameters, self.waves)

    def grid_obj(self):
        return self._build("grid", Grid, self.grid)

    def scheme_obj(self):
        return self._build("scheme", SchemeConfig, self.scheme)

    def perturbation_obj(self):
        kw = dict(self.perturbation)
        kw.setdefault("seed", self.seed)
        return self._build("perturbation", PerturbationSpec, kw)

    def as_dict(self):
        return asdict(self)


@dataclass
class ExperimentResult:
    status: int
    checks: list
    out: Path
    manifest: Path = None


def _verdict_text(rows):
    return "\n".join(r.line for r in rows) + "\n"


def _exit_status(rows):
    return EXIT_FAIL if any(r.status == "FAIL" for r in rows) else EXIT_OK


# ---------------------------------------------------------------- experiment kinds

def _profile(cfg, w):
    p = cfg.params()
    opt = cfg.options
    shock = build_shock_profile(p, opt.get("normalization", 0.0))
    xi = np.linspace(opt.get("xi_min", -20.0), opt.get("xi_max", 200.0), opt.get("n_samples", 2201))
    U, dU, _ = shock.evaluate(xi)
    w.csv("profile.csv", ("xi", "U", "U_xi"), zip(xi, U, dU))
    tails = [shock_tail_bounds(shock, side) for side in ("left", "right")]
    w.csv("profile_tails.csv", ("side", "law", "exponent", "prefactor", "r_squared"),
          [(t.side, t.law, t.exponent, t.prefactor, t.r_squared) for t in tails])
    w.svg("profile.svg", line_plot([("U", xi, U), ("U_xi", xi, dU)], "Shock profile", "xi", "value"))
    return checks.profile_checks(p)


def _rarefaction(cfg, w):
    p = cfg.params()
    if p.delta_R == 0:
        raise ConfigurationError("rarefaction experiment needs u_plus > u_mid")
    opt = cfg.options
    r = build_approx_rarefaction(p)
    rows = []
    for t in opt.get("snapshot_times", [10.0, 100.0, 1000.0]):
        pad = 10.0 + 0.05 * t
        x = np.linspace(p.lambda_minus * t - pad, p.lambda_plus * t + pad, opt.get("n_samples", 801))
        f = r.fields(t, x)
        rows.extend(zip(np.full(x.size, float(t)), x, f.u, f.u_x))
    w.csv("rarefaction.csv", ("t", "x", "uR", "uR_x"), rows)
    times = np.geomspace(10, 1e4, opt.get("n_times", 13))
    rep = rarefaction_decay_report(r, times, (1.0, 2.0, np.inf))
    ps = (1.0, 2.0, np.inf)
    header = ["t"] + [f"ux_L{k}" for k in ("1", "2", "inf")] + [f"uxx_L{k}" for k in ("1", "2", "inf")]
    w.csv("rarefaction_decay.csv", header,
          [[t] + [rep.ux_norms[q][i] for q in ps] + [rep.uxx_norms[q][i] for q in ps]
           for i, t in enumerate(times)])
    w.svg("rarefaction_decay.svg", line_plot(
        [(f"|uR_x| L{k}", times, rep.ux_norms[q]) for k, q in (("1", 1.0), ("2", 2.0), ("inf", np.inf))],
        "Rarefaction slope norms", "t", "norm", logx=True, logy=True))
    return checks.rarefaction_checks(p, times)


def _weight(cfg, w):
    p = cfg.params()
    rep = weight_algebra(WeightFunction(p), cfg.options.get("n_samples", 10_000))
    w.csv("weight_algebra.csv", rep.header, rep.rows())
    w.svg("weight_algebra.svg", line_plot(
        [("H1+H2", rep.u, rep.sum), ("2 u_m^4", rep.u, np.full(rep.u.size, 2 * p.u_mid**4))],
        "Weight algebra sweep", "uS", "H1+H2"))
    return checks.weight_checks(p)


def _poincare(cfg, w):
    opt = cfg.options
    cases = {"y": (lambda y: y, lambda y: np.ones_like(y)),
             "y2": (lambda y: y * y, lambda y: 2 * y)}
    chosen = opt.get("functions", ["y", "y2"])
    rows = []
    for name in chosen:
        if name not in cases:
            raise ConfigurationError(f"unknown Poincare test function {name!r}")
        r = poincare_check(*cases[name])
        rows.append((name, r.lhs, r.rhs, r.error_bound, r.satisfied))
    n_random = int(opt.get("n_random", 1000))
    rng = np.random.default_rng(cfg.seed)
    for i in range(n_random):
        r = poincare_check(*random_band_limited(rng))
        rows.append((f"random_{i}", r.lhs, r.rhs, r.error_bound, r.satisfied))
    w.csv("poincare.csv", ("case", "lhs", "rhs", "error_bound", "satisfied"), rows)
    out = []
    for name, lhs, rhs, bound, ok in rows[:len(chosen)]:
        out.append(checks.CheckResult(5, f"Poincare f={name}", "PASS" if ok else "FAIL",
                                      rhs - lhs, f"rhs - lhs >= -{bound:.2e}"))
    bad = sum(1 for r in rows[len(chosen):] if not r[4])
    out.append(checks.CheckResult(5, "Poincare random functions", "PASS" if bad == 0 else "FAIL",
                                  bad, f"0 violations of {n_random}"))
    return out


def _interactions(cfg, w):
    p = cfg.params()
    if p.delta_R == 0:
        raise ConfigurationError("interaction experiment needs u_plus > u_mid")
    opt = cfg.options
    times = np.geomspace(opt.get("t_min", 1e2), opt.get("t_max", 1e4), opt.get("n_times", 9))
    rep = interaction_integrals(p, times)
    w.csv("interactions.csv", ("t",) + INTERACTION_NAMES,
          [[t] + [rep.values[k][i] for k in INTERACTION_NAMES] for i, t in enumerate(times)])
    w.csv("interaction_fits.csv", ("name", "exponent", "prefactor", "r_squared", "target"),
          [(f.name, f.exponent, f.prefactor, f.r_squared,
            "" if f.target is None else f.target) for f in rep.fits.values()]
          + [("fan_gap_shock_slope_log_corrected", -rep.log_corrected.alpha,
              rep.log_corrected.prefactor, rep.log_corrected.r_squared, "")])
    w.svg("interactions.svg", line_plot([(k, times, rep.values[k]) for k in INTERACTION_NAMES],
                                        "Interaction integrals", "t", "value", logx=True, logy=True))
    return checks.interaction_checks(p, times)


def _evolve(cfg, w):
    p = cfg.params()
    grid, scheme, pert = cfg.grid_obj(), cfg.scheme_obj(), cfg.perturbation_obj()
    tr = run(pert, scheme, p, grid, sample_hook=energy_breakdown, budget_seconds=cfg.budget_seconds)
    stride = int(cfg.options.get("snapshot_stride", 10))
    xi = grid.nodes[::stride]
    rows = []
    for t, u, phi in zip(tr.times, tr.u, tr.phi):
        rows.extend(zip(np.full(xi.size, t), xi, u[::stride], phi[::stride]))
    w.csv("snapshots.csv", ("t", "xi", "u", "phi"), rows)
    w.csv("shift_history.csv", ("t", "X", "Xdot"), tr.shift_history)
    w.csv("diagnostics.csv", EnergyBreakdown.names(), [b.row() for b in tr.breakdowns])
    cm = convergence_metrics(tr, build_shock_profile(p), p)
    w.csv("convergence.csv", ("t", "sup_error", "Xdot", "X_over_t"),
          zip(cm.t, cm.sup_error, cm.Xdot, cm.X_over_t))
    t = np.array(tr.times)
    e = np.array([b.E_w for b in tr.breakdowns])
    w.svg("energy.svg", line_plot([("E_w", t, e), ("sup error", cm.t, cm.sup_error)],
                                  "Weighted energy and sup-norm error", "t", "value", logy=True))
    pure = p.delta_R == 0
    v = contraction_monitor(tr.breakdowns, p.u_mid, pure_shock=pure)
    out = [checks.CheckResult(7, "lemma lower bound on the shock good term",
                              "PASS" if v.lemma_holds else "FAIL", v.lemma_min_margin, ">= 0")]
    if pure:
        out.append(checks.CheckResult(7, "weighted energy non-increasing",
                                      "PASS" if v.energy_monotone else "FAIL",
                                      v.energy_max_increase, "relative increase <= 1e-8"))
    if pure and pert.kind == "zero":
        err = float(np.nanmax(cm.sup_error))
        out.append(checks.CheckResult(9, "steady state kept", "PASS" if err < 10 * grid.h**2 else "FAIL",
                                      err, f"< 10 h^2 = {10 * grid.h**2:.3g}"))
    if tr.times[-1] < scheme.end_time - 1e-9:
        out.append(checks.CheckResult(0, "run completed", "SKIPPED", tr.times[-1],
                                      f"budget stopped the run before t={scheme.end_time:g}"))
    amplitudes = cfg.options.get("amplitudes")
    if amplitudes:
        basin = amplitude_sweep(p, amplitudes, scheme, grid, base=pert,
                                budget_seconds=cfg.budget_seconds)
        w.csv("basin.csv", [f.name for f in fields(BasinRow)],
              [[getattr(b, f.name) for f in fields(BasinRow)] for b in basin])
        for b in basin:
            log.info("amplitude %g: %s", b.amplitude, b.outcome)
    return out


# Run lengths used by the suite; "quick" shortens the PDE checks.
SUITE_SCALE = {
    False: {"contraction": 200.0, "composite": 500.0, "shift": 100.0},
    True: {"contraction": 20.0, "composite": 50.0, "shift": 100.0},
}
# Rough single-core cost of each group at full scale, in seconds, used to skip
# groups that cannot finish inside the declared budget.
SUITE_COST = {"profile": 2, "rarefaction": 5, "weight": 1, "poincare": 10, "interactions": 20,
              "scheme": 60, "shift": 200, "contraction": 300, "composite": 1100}


def theorem_suite(cfg, writer=None):
    """Run every acceptance check family and return the verdict rows.

    Groups whose estimated cost would overrun ``cfg.budget_seconds`` are marked
    SKIPPED rather than started.
    """
    p = cfg.params()
    quick = bool(cfg.options.get("quick", False))
    scale = SUITE_SCALE[quick]
    budget = cfg.budget_seconds
    start = time.perf_counter()
    rows = []
    only = cfg.options.get("groups")
    for name, fn in checks.ALL_CHECKS:
        if only is not None and name not in only:
            continue
        cost = SUITE_COST[name]
        if name in scale:
            cost *= scale[name] / SUITE_SCALE[False][name]
        elapsed = time.perf_counter() - start
        if budget is not None and elapsed + cost > budget:
            rows.append(checks.CheckResult(0, f"{name} checks", "SKIPPED", float("nan"),
                                           f"budget {budget:g} s would be exceeded"))
            continue
        if name in ("rarefaction", "interactions", "weight"):
            got = fn(p)
        elif name == "composite":
            if p.delta_R == 0:
                got = [checks.CheckResult(8, "composite stability trend", "SKIPPED", float("nan"),
                                          "not applicable: delta_R = 0")]
            else:
                got = fn(end_time=scale[name], u_plus=cfg.options.get("composite_u_plus", 1.1))
        elif name == "contraction":
            got = fn(end_time=scale[name])
        elif name == "shift":
            got = fn(end_time=scale[name])
        elif name == "poincare":
            got = fn(int(cfg.options.get("n_random", 1000)), cfg.seed)
        else:
            got = fn()
        rows.extend(got)
        if writer is not None:
            writer.text(f"{name}/verdicts.txt", _verdict_text(got))
        for r in got:
            log.info("%s", r.line)
    return rows


RUNNERS = {"profile": _profile, "rarefaction": _rarefaction, "weight_algebra": _weight,
           "poincare": _poincare, "interactions": _interactions, "evolve": _evolve}


def run_experiment(cfg):
    """Execute one experiment, write its artefacts and return an ExperimentResult."""
    out = Path(cfg.out)
    writer = RunWriter(out, cfg.as_dict())
    start = time.perf_counter()
    if cfg.kind == "theorem_suite":
        rows = theorem_suite(cfg, writer)
    else:
        rows = RUNNERS[cfg.kind](cfg, writer)
    status = _exit_status(rows)
    writer.text("verdicts.txt", _verdict_text(rows))
    manifest = writer.manifest(exit_status=status,
                               verdicts=[[r.criterion, r.name, r.status] for r in rows])
    log.info("%s finished in %.1f s", cfg.kind, time.perf_counter() - start)
    return ExperimentResult(status, rows, out, manifest)


def build_parser():
    ap = argparse.ArgumentParser(prog="oleinik-lab", description=__doc__.split("\n")[0])
    ap.add_argument("--config", type=Path, help="JSON experiment config")
    ap.add_argument("--kind", choices=KINDS, help="experiment kind (overrides the config)")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="seed for random perturbations and test functions")
    ap.add_argument("--budget-seconds", type=float, help="wall-clock cap for long runs")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        d = {}
        if args.config is not None:
            d = ExperimentConfig.from_json(args.config).as_dict()
        for key, val in (("kind", args.kind), ("out", args.out), ("seed", args.seed),
                         ("budget_seconds", args.budget_seconds)):
            if val is not None:
                d[key] = val
        cfg = ExperimentConfig.from_dict(d)
        result = run_experiment(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure ({exc.status}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OleinikError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for r in result.checks:
        print(r.line)
    print(f"artefacts in {result.out} (exit {result.status})")
    return result.status


if __name__ == "__main__":
    sys.exit(main())
