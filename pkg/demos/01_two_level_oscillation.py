"""
Two-level superposition in Earth's field
========================================

A body whose internal state is an equal superposition of two levels 1 eV
apart, held at two heights 1 micron apart. The visibility oscillates as
|cos|, vanishes at t = pi hbar c^2 / (dE g dx) and then revives: nothing is
lost, only dephased.
"""

import math

import numpy as np

from gravdephase import (
    CODATA,
    InternalSpectrum,
    SuperpositionGeometry,
    dephasing_time,
    energy_variance,
    reversed_field_roundtrip,
    small_time_visibility,
    visibility,
)
from gravdephase.units import ev_to_joule

geom = SuperpositionGeometry(g=9.81, delta_x=1e-6)
state = InternalSpectrum.from_levels([(0.0, 0.5), (ev_to_joule(1.0), 0.5)])

t_D = dephasing_time(energy_variance(state), geom)
t_zero = math.pi * CODATA.hbar * CODATA.c**2 / (ev_to_joule(1.0) * geom.g * geom.delta_x)
print(f"t_D = {t_D:.4e} s, first zero at {t_zero:.4e} s ({t_zero / 86400 / 365:.2f} yr)")

t = np.linspace(0, 2 * t_zero, 9)
for ti, v, approx in zip(t, visibility(state, geom, t), small_time_visibility(t, t_D)):
    print(f"  t = {ti:10.3e} s   V = {v:.6f}   1 - t^2/t_D^2 -> {approx:.6f}")

# Run the same time in the opposite field and the phases cancel
print("roundtrip visibility at the zero:", reversed_field_roundtrip(state, geom, t_zero))
