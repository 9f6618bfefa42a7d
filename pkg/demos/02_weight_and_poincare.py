"""
The weight and the weighted Poincare inequality
===============================================

The stability estimate multiplies phi^2 by a piecewise weight w(U).  Two facts
carry it: H1 + H2 > 2 u_m^4 along the profile, and a Poincare inequality on
[0, 1] with the weight y(1 - y).
"""

import numpy as np

from oleinik_stability import WaveParameters, WeightFunction, poincare_check, weight_algebra
from oleinik_stability.weight import random_band_limited

p = WaveParameters(-2.0, 1.0)
wf = WeightFunction(p)
u = np.array([-2.0, -1.0, 0.0, 0.25, 0.5, 0.9])
print("w  ", wf.eval(u))
print("w' ", wf.eval_d1(u))
print("w''", wf.eval_d2(u))

rep = weight_algebra(wf)
print("min H1+H2 =", rep.sum.min(), " (must exceed", 2 * p.u_mid**4, ")")
print("definition vs closed form, worst relative gap:", rep.max_rel_discrepancy)
# the factor equals 1/6 exactly at u_minus, which the profile never reaches
inside = rep.u > p.u_minus
print("smallest Poincare factor:", np.nanmin(rep.poincare_factor[inside]), " (bound 1/6)")

# f(y) = y is the extremal case: both sides equal 1/12.
lin = poincare_check(lambda y: y, lambda y: np.ones_like(y))
print("f = y   :", lin.lhs, lin.rhs)
quad = poincare_check(lambda y: y * y, lambda y: 2 * y)
print("f = y^2 :", quad.lhs, "<=", quad.rhs)

rng = np.random.default_rng(0)
bad = sum(not poincare_check(*random_band_limited(rng)).satisfied for _ in range(200))
print("violations among 200 random functions:", bad)
