import json
import subprocess
import sys

import pytest

from oleinik_stability.artifacts import config_hash
from oleinik_stability.cli import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, ExperimentConfig, main,
                                   run_experiment)
from oleinik_stability.errors import ConfigurationError

SMALL_GRID = {"xi_min": -100.0, "xi_max": 200.0, "n": 3000}


def _write(tmp_path, d, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


def test_weight_algebra_run(tmp_path, capsys):
    out = tmp_path / "w"
    assert main(["--kind", "weight_algebra", "--out", str(out)]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    manifest = json.loads((out / "manifest.json").read_text())
    h = manifest["config_sha256"]
    assert h == config_hash(manifest["config"])
    for name in ("weight_algebra.csv", "verdicts.txt", "weight_algebra.svg"):
        assert f"manifest sha256={h}" in (out / name).read_text()
    assert set(manifest["files"]) == {"weight_algebra.csv", "weight_algebra.svg", "verdicts.txt"}
    assert manifest["exit_status"] == 0


def test_csvs_are_byte_identical_for_same_seed(tmp_path):
    cfg = {"kind": "poincare", "options": {"n_random": 20}, "seed": 3}
    a = run_experiment(ExperimentConfig.from_dict({**cfg, "out": str(tmp_path / "a")}))
    b = run_experiment(ExperimentConfig.from_dict({**cfg, "out": str(tmp_path / "b")}))
    c = run_experiment(ExperimentConfig.from_dict({**cfg, "seed": 4, "out": str(tmp_path / "c")}))
    assert a.status == b.status == EXIT_OK
    assert (a.out / "poincare.csv").read_bytes() == (b.out / "poincare.csv").read_bytes()
    assert (a.out / "poincare.csv").read_bytes() != (c.out / "poincare.csv").read_bytes()


def test_poincare_rows(tmp_path):
    res = run_experiment(ExperimentConfig(kind="poincare", options={"n_random": 5},
                                          out=str(tmp_path)))
    lines = (tmp_path / "poincare.csv").read_text().splitlines()
    assert lines[1] == "case,lhs,rhs,error_bound,satisfied"
    assert len(lines) == 2 + 2 + 5
    assert [r.status for r in res.checks] == ["PASS"] * 3


def test_profile_run(tmp_path):
    res = run_experiment(ExperimentConfig(kind="profile", waves={"u_minus": -2.0, "u_plus": 1.0},
                                          options={"n_samples": 101}, out=str(tmp_path)))
    assert res.status == EXIT_OK
    rows = (tmp_path / "profile.csv").read_text().splitlines()
    assert len(rows) == 2 + 101
    assert (tmp_path / "profile_tails.csv").exists()


def test_short_evolution_keeps_steady_shock(tmp_path):
    cfg = ExperimentConfig(kind="evolve", waves={"u_minus": -2.0, "u_plus": 1.0},
                           grid=SMALL_GRID, scheme={"end_time": 0.2, "output_every": 0.1},
                           perturbation={"kind": "zero"}, out=str(tmp_path))
    res = run_experiment(cfg)
    assert res.status == EXIT_OK
    assert {r.name for r in res.checks} >= {"steady state kept", "weighted energy non-increasing"}
    for name in ("snapshots.csv", "shift_history.csv", "diagnostics.csv", "convergence.csv"):
        assert (tmp_path / name).exists()
    snap = (tmp_path / "snapshots.csv").read_text().splitlines()
    assert len(snap) == 2 + 3 * 301


def test_evolution_csvs_repeat_exactly(tmp_path):
    d = {"kind": "evolve", "grid": SMALL_GRID, "scheme": {"end_time": 0.1, "output_every": 0.05},
         "perturbation": {"kind": "noise", "amplitude": 0.02}, "seed": 7}
    a = run_experiment(ExperimentConfig.from_dict({**d, "out": str(tmp_path / "a")}))
    b = run_experiment(ExperimentConfig.from_dict({**d, "out": str(tmp_path / "b")}))
    for name in ("snapshots.csv", "diagnostics.csv", "shift_history.csv"):
        assert (a.out / name).read_bytes() == (b.out / name).read_bytes()


@pytest.mark.parametrize("d", [
    {"kind": "nonsense"},
    {"colour": "red"},
    {"waves": {"u_minus": -2.0, "u_plus": 0.5}},
    {"grid": {"xi_min": 1.0, "xi_max": 0.0}},
    {"scheme": {"cfl": -1}},
    {"scheme": {"stepper": "rk4"}},
    {"perturbation": {"kind": "sawtooth"}},
    {"budget_seconds": 0},
])
def test_bad_config_exits_2(tmp_path, d, capsys):
    assert main(["--config", _write(tmp_path, d), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_unreadable_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == EXIT_CONFIG
    assert main(["--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_json(_write(tmp_path, [1, 2]))


def test_rarefaction_kind_needs_a_fan(tmp_path):
    d = {"kind": "rarefaction", "waves": {"u_minus": -2.0, "u_plus": 1.0}, "out": str(tmp_path)}
    assert main(["--config", _write(tmp_path, d)]) == EXIT_CONFIG


def test_blow_up_exits_3(tmp_path, capsys):
    d = {"kind": "evolve", "grid": SMALL_GRID, "scheme": {"end_time": 0.1, "blowup_threshold": 2.2},
         "perturbation": {"kind": "gaussian", "amplitude": -0.5, "center": -20.0}, "out": str(tmp_path)}
    assert main(["--config", _write(tmp_path, d)]) == EXIT_NUMERICAL
    assert "blow_up" in capsys.readouterr().err


def test_suite_budget_skips_groups(tmp_path):
    cfg = ExperimentConfig(kind="theorem_suite", budget_seconds=15.0,
                           options={"groups": ["weight", "composite"]}, out=str(tmp_path))
    res = run_experiment(cfg)
    by_status = {r.status for r in res.checks}
    assert "SKIPPED" in by_status and "FAIL" not in by_status
    assert res.status == EXIT_OK
    assert "SKIPPED" in (tmp_path / "verdicts.txt").read_text()


def test_suite_marks_fan_checks_not_applicable(tmp_path):
    cfg = ExperimentConfig(kind="theorem_suite", waves={"u_minus": -2.0, "u_plus": 1.0},
                           options={"groups": ["rarefaction", "interactions", "composite"]},
                           out=str(tmp_path))
    res = run_experiment(cfg)
    assert res.checks and all(r.status == "SKIPPED" for r in res.checks)
    assert all("not applicable" in r.threshold for r in res.checks)


def test_module_entry_point(tmp_path):
    done = subprocess.run([sys.executable, "-m", "oleinik_stability", "--kind", "weight_algebra",
                           "--out", str(tmp_path)], capture_output=True, text=True, timeout=300)
    assert done.returncode == 0, done.stderr
    assert "artefacts in" in done.stdout


def test_evolve_amplitude_sweep_writes_basin(tmp_path):
    cfg = ExperimentConfig(kind="evolve", waves={"u_minus": -2.0, "u_plus": 1.0}, grid=SMALL_GRID,
                           scheme={"end_time": 0.5, "output_every": 0.25},
                           perturbation={"kind": "gaussian", "amplitude": 0.01},
                           options={"amplitudes": [0.01, 0.02]}, out=str(tmp_path))
    run_experiment(cfg)
    lines = (tmp_path / "basin.csv").read_text().splitlines()
    assert lines[1].startswith("amplitude,outcome")
    assert len(lines) == 4


def test_suite_groups_write_own_subdirectories(tmp_path):
    cfg = ExperimentConfig(kind="theorem_suite", options={"groups": ["weight", "profile"]},
                           out=str(tmp_path))
    res = run_experiment(cfg)
    assert res.status == EXIT_OK
    for g in ("weight", "profile"):
        assert "PASS" in (tmp_path / g / "verdicts.txt").read_text()
