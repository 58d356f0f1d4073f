"""Gravitational time-dilation dephasing of mesoscopic quantum superpositions."""

from .collisional import (
    CollisionalBath,
    CrossoverReport,
    collisional_time,
    collisional_visibility,
    compare_timescales,
    crossover_density,
    lambda_rate,
    q2v_thermal,
)
from .dephasing import (
    DephasingReport,
    DivergentTimescale,
    SuperpositionGeometry,
    VisibilityTrace,
    compose_independent,
    dephasing_report,
    dephasing_time,
    internal_phase,
    lower_bound_log,
    n_subsystem_dephasing_time,
    offdiag_element,
    reversed_field_roundtrip,
    small_time_visibility,
    time_average_analytic,
    time_average_numeric,
    trace,
    visibility,
)
from .spectrum import (
    GroupedSpectrum,
    InternalSpectrum,
    MixtureEnsemble,
    effective_spectrum,
    energy_variance,
    group_degenerate,
    mean_energy,
    purity_sum,
    thermal_oscillator_spectrum,
    thermal_variance,
    uniform_spectrum,
)
from .units import CODATA, PAPER, PhysicalConstants, get_constants

__version__ = "0.1.0"
