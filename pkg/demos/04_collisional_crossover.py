"""
Gravitational dephasing against gas collisions
==============================================

With nitrogen at room temperature, gravitational dephasing of the cube
beats collisional decoherence only below ~1.2e-5 molecules per cm^3,
some 1e-24 of atmospheric density.
"""

import numpy as np

from gravdephase import compare_timescales
from gravdephase.cli import atmospheric_density_per_cm3, run_paper_repro
from gravdephase.scenario import load_scenario
from gravdephase.units import per_cm3_to_per_m3

rep = run_paper_repro()
print(f"crossover density (rounded constants): {rep['n_crossover_rendered']}")
print(f"crossover density (CODATA constants):  {rep['codata_check']['n_crossover_per_cm3']:.4e} cm^-3")
print(f"fraction of atmospheric density:       {rep['atmospheric_ratio']:.2e}")

s = load_scenario("thermal-cube")
print("\n  n [cm^-3]      t_ND [s]      t_coll [s]    gravity first?")
for n_cm3 in np.logspace(-8, 19, 10):
    bath = s.bath.with_density(per_cm3_to_per_m3(n_cm3))
    cr = compare_timescales(s.subsystems, s.geometry, bath, equilibrium=True)
    print(f"  {n_cm3:9.2e}   {cr.t_ND:11.4e}   {cr.t_coll:11.4e}   {cr.gravitational_dominates}")
print(f"\natmosphere (1 atm, 293 K): {atmospheric_density_per_cm3():.3e} cm^-3")
