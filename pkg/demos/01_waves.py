"""
The two waves
=============

A degenerate viscous shock from u_minus = -2 to u_mid = 1, and the smooth
rarefaction from u_mid to u_plus = 1.2 that follows it.
"""

import numpy as np

from oleinik_stability import (WaveParameters, build_approx_rarefaction, build_shock_profile,
                               classify_riemann, rarefaction_decay_report, shock_tail_bounds)
from oleinik_stability.waves import rarefaction_sup_gap

p = WaveParameters(-2.0, 1.2, mu=1.0)
print(classify_riemann(p.u_minus, p.u_plus))
print("shock speed", p.sigma, " shock strength", p.delta_S, " fan strength", p.delta_R)

# The profile is evaluated by inverting its implicit integral, not by marching an ODE.
shock = build_shock_profile(p)
xi = np.array([-2.0, -0.5, 0.0, shock.xi_star, 10.0, 100.0, 1000.0])
for x, u in zip(xi, shock.eval(xi)):
    print(f"U({x:9.3f}) = {u: .12f}")

# Left side: exponential approach to u_minus.  Right side: only algebraic,
# because f'(u_mid) equals the shock speed there.
for side in ("left", "right"):
    tb = shock_tail_bounds(shock, side)
    print(side, tb.law, "exponent", round(tb.exponent, 4), "prefactor", round(tb.prefactor, 4))

# The rarefaction spreads out like 1/t in slope.
r = build_approx_rarefaction(p)
times = np.geomspace(10, 1e4, 13)
rep = rarefaction_decay_report(r, times, (1.0, 2.0, np.inf))
print("slope of |uR_x|_inf vs t:", round(rep.ux_fits[np.inf].slope, 3))
print("slope of |uR_x|_2   vs t:", round(rep.ux_fits[2.0].slope, 3))
print("|uR_x|_1 stays at delta_R:", rep.ux_norms[1.0][[0, -1]])

# and it approaches the exact self-similar fan
print("sup gap to exact fan at t=10 and t=1e4:", rarefaction_sup_gap(r, 10.0), rarefaction_sup_gap(r, 1e4))
