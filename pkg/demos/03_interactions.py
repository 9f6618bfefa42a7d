"""
How fast the two waves stop talking to each other
=================================================

Six integrals pair the gap of one wave with the slope of the other.  They are
plain quadratures of the wave evaluators, no PDE involved.
"""

import numpy as np

from oleinik_stability import WaveParameters, interaction_integrals

p = WaveParameters(-2.0, 1.2)
times = np.geomspace(1e2, 1e4, 9)
rep = interaction_integrals(p, times)

for name, exponent, prefactor, r2 in rep.table():
    target = rep.fits[name].target
    print(f"{name:30s} exponent {exponent: .3f}  target {target}  R2 {r2:.4f}")

lc = rep.log_corrected
print(f"log-corrected fit of the fan term: t^-{lc.alpha:.3f} log(1 + {lc.k:.3g} t)^{lc.beta}")

# The exponents drift: the observed slopes are local and still moving at t = 1e4.
for k in ("shock_gap_rare_slope_right", "fan_gap_shock_slope"):
    v = rep.values[k]
    local = np.diff(np.log(v)) / np.diff(np.log1p(times))
    print(k, "local slopes", np.round(local, 3))
