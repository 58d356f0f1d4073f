"""
The visibility does not decay to zero
=====================================

For distinct levels the long-time mean of V^2 is sum_n w_n^2, at least
1/L for L levels. A brute-force quadrature over longer and longer windows
closes in on it.
"""

import numpy as np

from gravdephase import GroupedSpectrum, SuperpositionGeometry, time_average_analytic, time_average_numeric
from gravdephase.dephasing import beat_periods
from gravdephase.units import ev_to_joule

rng = np.random.default_rng(0)
geom = SuperpositionGeometry(9.81, 1e-6)
energies = ev_to_joule(np.cumsum(rng.uniform(0.5, 1.5, 5)))
weights = rng.dirichlet(np.ones(5))
g = GroupedSpectrum(energies, weights)

exact = time_average_analytic(g)
print(f"sum w^2 = {exact:.6f}   (1/L = {1 / len(g):.3f})")
slowest, fastest = beat_periods(g, geom)
for periods in (10, 100, 1000, 10000):
    avg = time_average_numeric(g, geom, periods * slowest)
    print(f"  window = {periods:6d} slowest beats   mean V^2 = {avg:.6f}   error = {avg - exact:+.2e}")
