"""
Shock plus rarefaction: the trend
=================================

With u_plus = 1.1 the solution should approach the shifted shock glued to the
exact fan.  The sup error, |X'| and |X|/t should all fall over the second half
of the run in log-time.  This is a shortened version of the t = 500 check.
"""

import numpy as np

from oleinik_stability import (Grid, PerturbationSpec, SchemeConfig, WaveParameters,
                               build_shock_profile, convergence_metrics, run)
from oleinik_stability.checks import trend_samples

p = WaveParameters(-2.0, 1.1)
grid = Grid(-200.0, 400.0, 6000)
T = 60.0
tr = run(PerturbationSpec("gaussian", 0.05), SchemeConfig(end_time=T, output_every=1.0), p, grid)
cm = convergence_metrics(tr, build_shock_profile(p), p)

idx = trend_samples(cm.t, T, n=10)
print("     t     sup err       |X'|      |X|/t")
for i in idx:
    print(f"{cm.t[i]:6.1f}  {cm.sup_error[i]:.3e}  {abs(cm.Xdot[i]):.3e}  {abs(cm.X_over_t[i]):.3e}")
sup = cm.sup_error[np.isfinite(cm.sup_error)]
print("final / peak sup error:", sup[-1] / sup.max())
