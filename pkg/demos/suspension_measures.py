"""Suspension flows over the golden-mean shift and lifted Markov measures.

A positive ceiling over the base shift yields a flow that moves points
vertically and re-enters through the roof identification.  Shift-invariant
measures lift to flow-invariant probabilities represented by integrators.
"""

import numpy as np

from torusdyn import (
    GOLDEN_MEAN,
    CeilingFunction,
    OrbitMeasure,
    SuspensionPoint,
    SymbolWindow,
    lift_measure,
    orbit_weight,
    parry_measure,
    suspend_flow,
)

tau = CeilingFunction.symbol_bonus(1.0, 0.5, symbol=1)   # tau = 1 + [w_0 = 1]/2
nu = parry_measure(GOLDEN_MEAN)
print(f"Parry measure: p = {np.round(nu.p, 4)}, entropy rate {nu.entropy_rate():.6f}")

# --- flowing a point through two roofs
w = SymbolWindow.periodic((0, 1, 0, 0, 1), radius=16)
pt = SuspensionPoint(w, 0.0)
out = suspend_flow(pt, 2.3, tau)
print(f"flow by t=2.3 from height 0: shifted {out.base.center - w.center} symbols, "
      f"height {out.height:.2f}")

# --- the lifted probability integrates fiber by fiber
integ = lift_measure(nu, tau)
print(f"mean ceiling E[tau] = {integ.total_time:.6f}")
print(f"integral of 1:        {integ.integrate(lambda w, s: 1.0):.6f}")
print(f"integral of height:   {integ.integrate(lambda w, s: s):.6f}")
print(f"mass above symbol 0:  {integ.integrate(lambda w, s: float(w[0] == 0)):.6f}")

# --- periodic orbits as measures; the suspended action functional
for cyc in ((0,), (0, 1), (0, 0, 1)):
    total = orbit_weight(cyc, tau, lambda w, s: 1.0)
    hit = orbit_weight(cyc, tau, lambda w, s: float(w[0] == 1))
    print(f"cycle {cyc}: suspended period {total:.2f}, time above symbol 1: {hit:.2f}")

mu = OrbitMeasure([(0,), (0, 1)], [0.25, 0.75])
print(f"orbit-measure expectation of [w_0=1]: {mu.expect_window(lambda w: w[0] == 1, 2):.4f}")
