"""
Collisional decoherence from a thermal gas, and its crossover with
gravitational dephasing.

In the short-separation limit scattering suppresses the coherence as
``exp(-t / t_coll)`` with ``t_coll = 1 / (Lambda delta_x^2)`` and
localization rate ``Lambda = n sigma <q^2 v> / (3 hbar^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dephasing import DivergentTimescale, SuperpositionGeometry, n_subsystem_dephasing_time
from .units import CODATA, PhysicalConstants, per_m3_to_per_cm3, thermal_energy

__all__ = [
    "CollisionalBath",
    "CrossoverReport",
    "q2v_thermal",
    "lambda_rate",
    "collisional_time",
    "collisional_time_from_rate",
    "collisional_visibility",
    "crossover_density",
    "compare_timescales",
]


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class CollisionalBath:
    """Thermal gas of scatterers.

    Attributes
    ----------
    n : float
        Number density, m^-3.
    sigma : float
        Scattering cross section, m^2.
    m_scatterer : float
        Scatterer mass, kg.
    T : float
        Gas temperature, K.
    """

    n: float
    sigma: float
    m_scatterer: float
    T: float

    def __post_init__(self):
        _require_positive(n=self.n, sigma=self.sigma, m_scatterer=self.m_scatterer, T=self.T)

    def with_density(self, n: float) -> CollisionalBath:
        return CollisionalBath(n, self.sigma, self.m_scatterer, self.T)


@dataclass(frozen=True)
class CrossoverReport:
    """Gravitational vs collisional timescales for one scenario.

    ``gravitational_dominates`` is ``n < n_crossover`` (strict): at the
    crossover density itself the two timescales tie and collisions win.
    """

    t_ND: float
    t_coll: float
    n_crossover: float
    gravitational_dominates: bool

    @property
    def n_crossover_per_cm3(self) -> float:
        return per_m3_to_per_cm3(self.n_crossover)


def q2v_thermal(m: float, T: float, constants: PhysicalConstants = CODATA) -> float:
    """Thermal average ``<q^2 v> = 4 sqrt(m/pi) (2 k_B T)^(3/2)``, kg^2 m^3 s^-3."""
    _require_positive(m=m, T=T)
    return 4.0 * math.sqrt(m / math.pi) * (2.0 * thermal_energy(T, constants)) ** 1.5


def lambda_rate(bath: CollisionalBath, constants: PhysicalConstants = CODATA) -> float:
    """Localization rate ``Lambda``, m^-2 s^-1."""
    q2v = q2v_thermal(bath.m_scatterer, bath.T, constants)
    return bath.n * bath.sigma * q2v / (3.0 * constants.hbar**2)


def collisional_time_from_rate(lam: float, delta_x: float) -> float:
    """``1 / (Lambda delta_x^2)``; raises :class:`DivergentTimescale` for ``Lambda = 0``."""
    if lam < 0:
        raise ValueError(f"localization rate must be >= 0, got {lam!r}")
    if delta_x == 0:
        raise ValueError("delta_x must be nonzero")
    if lam == 0:
        raise DivergentTimescale("no collisional decoherence: localization rate is zero")
    return 1.0 / (lam * delta_x**2)


def collisional_time(bath: CollisionalBath, delta_x: float, constants: PhysicalConstants = CODATA) -> float:
    """Collisional decoherence time for a superposition of size ``delta_x`` (m)."""
    return collisional_time_from_rate(lambda_rate(bath, constants), delta_x)


def collisional_visibility(t, t_coll: float):
    """Normalized coherence ``exp(-t / t_coll)``."""
    if not t_coll > 0:
        raise ValueError(f"t_coll must be > 0, got {t_coll!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be >= 0")
    return np.exp(-t / t_coll)


def crossover_density(
    N: int, geom: SuperpositionGeometry, sigma: float, m: float, T: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Density (m^-3) below which gravitational dephasing beats collisions.

    Closed form for an object in equilibrium with the gas (energy spread
    ``k_B T`` per subsystem)::

        n* = 3 sqrt(N pi) / 16 * hbar g / (c^2 |dx| sigma sqrt(m k_B T))
    """
    _require_positive(N=N, sigma=sigma, m=m, T=T, g=abs(geom.g), delta_x=abs(geom.delta_x))
    kT = thermal_energy(T, constants)
    prefactor = 3.0 * math.sqrt(N * math.pi) / 16.0
    return prefactor * constants.hbar * abs(geom.g) / (
        constants.c**2 * abs(geom.delta_x) * sigma * math.sqrt(m * kT)
    )


def compare_timescales(
    N: int,
    geom: SuperpositionGeometry,
    bath: CollisionalBath,
    delta_E_single: float | None = None,
    equilibrium: bool = False,
    constants: PhysicalConstants = CODATA,
) -> CrossoverReport:
    """Compare ``t_ND`` with ``t_coll`` and locate the crossover density.

    Parameters
    ----------
    delta_E_single : float, optional
        Energy spread per subsystem, J. Required unless ``equilibrium``.
    equilibrium : bool
        Object in thermal equilibrium with the gas: the spread per subsystem
        is forced to ``k_B T`` of the bath, and the crossover is the closed
        form of :func:`crossover_density`.
    """
    if equilibrium:
        delta_E_single = thermal_energy(bath.T, constants)
    elif delta_E_single is None:
        raise ValueError("delta_E_single is required unless equilibrium=True")
    t_ND = n_subsystem_dephasing_time(delta_E_single, N, geom, constants)
    t_coll = collisional_time(bath, geom.delta_x, constants)
    if equilibrium:
        n_cross = crossover_density(N, geom, bath.sigma, bath.m_scatterer, bath.T, constants)
    else:
        # t_coll is inversely proportional to n: rescale to t_coll = t_ND
        n_cross = bath.n * t_coll / t_ND
    return CrossoverReport(t_ND, t_coll, n_cross, bath.n < n_cross)
