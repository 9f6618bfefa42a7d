"""
A perturbed degenerate shock relaxes
====================================

Pure shock (u_plus = u_mid), Gaussian perturbation of height 0.1.  The weighted
energy must never increase and the lower bound on the shock's good term must
hold at every sample.  A coarse grid keeps this under a minute; the acceptance
run uses n = 12000 and t = 200.
"""

import numpy as np

from oleinik_stability import (Grid, PerturbationSpec, SchemeConfig, WaveParameters,
                               contraction_monitor, energy_breakdown, run)

p = WaveParameters(-2.0, 1.0)
grid = Grid(-100.0, 200.0, 3000)
cfg = SchemeConfig(end_time=20.0, output_every=0.5)
tr = run(PerturbationSpec("gaussian", 0.1), cfg, p, grid, sample_hook=energy_breakdown)

for b in tr.breakdowns[::8]:
    print(f"t={b.t:6.2f}  E_w={b.E_w:.3e}  GS={b.GS:.3e}  X={b.X: .5f}  X'={b.Xdot: .2e}")

v = contraction_monitor(tr.breakdowns, p.u_mid)
print("energy non-increasing:", v.energy_monotone, " lemma holds:", v.lemma_holds)
print("shift settles at", tr.X[-1])
