"""
A 1e-7 cm cube of ~1000 independent modes
=========================================

Each mode is a uniform three-level superposition with spread k_B T at room
temperature. The N-mode visibility is the product of the single-mode ones:
Gaussian at early times with timescale t_ND, and a long-time floor
(1/3)^1000 that is zero for all practical purposes.
"""

import math

import numpy as np

from gravdephase import compose_independent, dephasing_report, visibility
from gravdephase.dephasing import gaussian_visibility
from gravdephase.scenario import load_scenario

s = load_scenario("thermal-cube")
mode = s.grouped()
report = dephasing_report(mode, s.geometry, s.subsystems)
print(f"single-mode t_D = {report.t_D:.4e} s")
print(f"{s.subsystems}-mode t_ND = {report.t_ND:.4e} s")

V_cube = compose_independent(lambda t: visibility(mode, s.geometry, t), s.subsystems)
t = report.t_ND * np.array([0.0, 0.1, 0.3, 0.5, 1.0, 2.0])
for ti, exact, gauss in zip(t, V_cube(t), gaussian_visibility(t, report.t_ND)):
    print(f"  t/t_ND = {ti / report.t_ND:4.1f}   V^N = {exact:.6e}   exp(-t^2/t_ND^2) = {gauss:.6e}")

print(f"long-time floor: ln = {report.lower_bound_log:.2f}, "
      f"i.e. 10^{report.lower_bound_log / math.log(10):.1f}")
