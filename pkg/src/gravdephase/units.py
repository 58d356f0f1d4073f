"""
Physical constants and unit conversions.

Everything inside the package is SI. Inputs quoted in eV, eV/c^2, cm, cm^2
or cm^-3 are converted once, at the ingestion boundary, with the helpers
below.

Two constant sets are available:

``codata``
    CODATA exact defined values (via :mod:`scipy.constants`).
``paper``
    The two-digit rounded values used for the original crossover-density
    estimate (hbar = 6.6e-16 eV s, c = 3e10 cm/s). Only the reproduction
    path should use these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants as _sc

__all__ = [
    "ELECTRON_VOLT",
    "PhysicalConstants",
    "CODATA",
    "PAPER",
    "CONSTANT_MODES",
    "get_constants",
    "ev_to_joule",
    "joule_to_ev",
    "mass_ev_per_c2_to_kg",
    "mass_kg_to_ev_per_c2",
    "thermal_energy",
    "temperature_from_energy",
    "cm_to_m",
    "cm2_to_m2",
    "per_cm3_to_per_m3",
    "per_m3_to_per_cm3",
]

#: Joules per electron volt (exact by definition).
ELECTRON_VOLT = _sc.electron_volt


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable bundle of the constants every formula needs.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, J s.
    c : float
        Speed of light, m/s.
    k_B : float
        Boltzmann constant, J/K.
    g_earth : float
        Default gravitational acceleration, m/s^2.
    name : str
        Label of the constant set, used in reports.
    """

    hbar: float = _sc.hbar
    c: float = _sc.c
    k_B: float = _sc.k
    g_earth: float = 9.81
    name: str = "codata"

    def __post_init__(self):
        for field in ("hbar", "c", "k_B", "g_earth"):
            value = getattr(self, field)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{field} must be finite and > 0, got {value!r}")

    def with_gravity(self, g_earth: float) -> PhysicalConstants:
        """Return a copy with a different default ``g``."""
        return replace(self, g_earth=g_earth)


CODATA = PhysicalConstants()

# k_B keeps its defined value: the rounded estimate quotes k_B T directly.
PAPER = PhysicalConstants(
    hbar=6.6e-16 * ELECTRON_VOLT,
    c=3.0e8,
    k_B=_sc.k,
    g_earth=9.81,
    name="paper",
)

CONSTANT_MODES = {"codata": CODATA, "paper": PAPER}


def get_constants(mode: str | PhysicalConstants | None = None) -> PhysicalConstants:
    """Resolve a constants mode name (``"codata"`` or ``"paper"``).

    ``None`` gives CODATA; a :class:`PhysicalConstants` passes through.
    """
    if mode is None:
        return CODATA
    if isinstance(mode, PhysicalConstants):
        return mode
    try:
        return CONSTANT_MODES[mode]
    except KeyError:
        raise ValueError(
            f"unknown constants mode {mode!r}; expected one of {sorted(CONSTANT_MODES)}"
        ) from None


def ev_to_joule(e):
    """Convert an energy from eV to J."""
    return e * ELECTRON_VOLT


def joule_to_ev(e):
    """Convert an energy from J to eV."""
    return e / ELECTRON_VOLT


def mass_ev_per_c2_to_kg(m, constants: PhysicalConstants = CODATA):
    """Convert a mass quoted in eV/c^2 to kg.

    The speed of light is taken from ``constants`` so that the rounded
    constant set stays self-consistent.
    """
    if m < 0:
        raise ValueError(f"mass must be >= 0, got {m!r} eV/c^2")
    return ev_to_joule(m) / constants.c**2


def mass_kg_to_ev_per_c2(m, constants: PhysicalConstants = CODATA):
    if m < 0:
        raise ValueError(f"mass must be >= 0, got {m!r} kg")
    return joule_to_ev(m * constants.c**2)


def thermal_energy(T, constants: PhysicalConstants = CODATA):
    """Return ``k_B T`` in J for a temperature in K."""
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T!r} K")
    return constants.k_B * T


def temperature_from_energy(kT, constants: PhysicalConstants = CODATA):
    """Invert :func:`thermal_energy`: temperature in K whose ``k_B T`` is ``kT`` J."""
    if kT < 0:
        raise ValueError(f"thermal energy must be >= 0, got {kT!r} J")
    return kT / constants.k_B


def cm_to_m(x):
    return x * 1e-2


def cm2_to_m2(x):
    return x * 1e-4


def per_cm3_to_per_m3(n):
    return n * 1e6


def per_m3_to_per_cm3(n):
    return n * 1e-6
