"""
Scenario documents: JSON in, validated SI objects out.

Every dimensional key carries its unit in the name (``delta_x_m`` or
``delta_x_cm``, ``energy_ev`` or ``energy_joule``, ...). Alternatives for the
same quantity are mutually exclusive, and unknown keys are rejected.
:func:`scenario_to_dict` writes the normalized (SI) form back out; parsing
that document again gives an equal :class:`Scenario`.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import units
from .collisional import CollisionalBath
from .dephasing import SuperpositionGeometry
from .spectrum import (
    GroupedSpectrum,
    InternalSpectrum,
    MixtureEnsemble,
    NORMALIZATION_TOL,
    as_grouped,
    thermal_oscillator_spectrum,
    uniform_spectrum,
)

__all__ = [
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "GridSpec",
    "Scenario",
    "BUILTIN_SCENARIOS",
    "parse_scenario",
    "load_scenario",
    "scenario_to_dict",
]


class ScenarioError(ValueError):
    """Base class for scenario problems."""


class ScenarioParseError(ScenarioError):
    """The document is not valid JSON."""


class ScenarioValidationError(ScenarioError):
    """The document is JSON but violates the schema or a physical constraint."""


@dataclass(frozen=True)
class GridSpec:
    start_s: float
    stop_s: float
    count: int
    spacing: str = "linear"

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start_s, self.stop_s, self.count)
        return np.linspace(self.start_s, self.stop_s, self.count)


@dataclass(frozen=True)
class Scenario:
    """A fully validated run description, all quantities SI.

    ``spectrum`` holds the normalized spectrum document, either
    ``{"levels": ...}``, ``{"thermal": ...}``, ``{"uniform": ...}`` or
    ``{"mixture": [...]}``.
    """

    spectrum: dict
    geometry: SuperpositionGeometry
    subsystems: int = 1
    bath: CollisionalBath | None = None
    bath_equilibrium: bool = False
    grid: GridSpec | None = None
    constants_mode: str = "codata"
    name: str | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def constants(self) -> units.PhysicalConstants:
        return units.get_constants(self.constants_mode)

    def internal_state(self) -> InternalSpectrum | MixtureEnsemble:
        return _build_state(self.spectrum, self.constants)

    def grouped(self) -> GroupedSpectrum:
        if "grouped" not in self._cache:
            self._cache["grouped"] = as_grouped(self.internal_state())
        return self._cache["grouped"]


# -- helpers ---------------------------------------------------------------

def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return ""
    return f" (line {text.count(chr(10), 0, m.start()) + 1})"


class _Reader:
    """Walks one JSON object, tracking which keys were consumed."""

    def __init__(self, obj, path: str, text: str | None):
        if not isinstance(obj, dict):
            where = _line_of(text, path.rsplit(".", 1)[-1]) if path else ""
            raise ScenarioValidationError(
                f"{path or 'document'}: expected an object, got {type(obj).__name__}{where}"
            )
        self.obj = obj
        self.path = path
        self.text = text
        self.used: set[str] = set()

    def where(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def fail(self, key: str, message: str):
        raise ScenarioValidationError(f"{self.where(key)}: {message}{_line_of(self.text, key)}")

    def has(self, key: str) -> bool:
        return key in self.obj

    def raw(self, key: str, default: Any = None):
        self.used.add(key)
        return self.obj.get(key, default)

    def number(self, key: str, unit: str, default: Any = None, required: bool = True):
        if key not in self.obj:
            if default is not None or not required:
                return default
            self.fail(key, f"missing; expected a number in {unit}")
        self.used.add(key)
        value = self.obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(key, f"expected a number in {unit}, got {value!r}")
        if not math.isfinite(value):
            self.fail(key, f"expected a finite number in {unit}")
        return float(value)

    def integer(self, key: str, default: int | None = None, minimum: int = 1):
        if key not in self.obj:
            if default is not None:
                return default
            self.fail(key, "missing; expected an integer")
        self.used.add(key)
        value = self.obj[key]
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(key, f"expected an integer, got {value!r}")
        if value < minimum:
            self.fail(key, f"must be >= {minimum}, got {value}")
        return value

    def one_of(
        self, alternatives: dict[str, tuple[str, Any]], label: str,
        required: bool = True, positive: bool = False,
    ):
        """Read exactly one unit-bearing alternative and convert it to SI.

        ``alternatives`` maps key -> (unit label, converter).
        """
        present = [k for k in alternatives if k in self.obj]
        if len(present) > 1:
            self.fail(present[1], f"conflicts with {self.where(present[0])}; give {label} once")
        if not present:
            if not required:
                return None
            keys = " or ".join(f"{k} [{u}]" for k, (u, _) in alternatives.items())
            raise ScenarioValidationError(
                f"{self.path or 'document'}: missing {label}; expected {keys}"
            )
        key = present[0]
        unit, convert = alternatives[key]
        value = self.number(key, unit)
        if positive and not value > 0:
            self.fail(key, f"must be > 0 {unit}, got {value!r}")
        try:
            return convert(value)
        except ValueError as exc:
            self.fail(key, str(exc))

    def finish(self):
        extra = sorted(set(self.obj) - self.used)
        if extra:
            self.fail(extra[0], f"unknown key {extra[0]!r}")


# -- spectrum --------------------------------------------------------------

def _parse_spectrum(obj, path: str, text, constants) -> dict:
    r = _Reader(obj, path, text)
    kinds = [k for k in ("levels", "thermal", "uniform") if r.has(k)]
    if len(kinds) != 1:
        raise ScenarioValidationError(
            f"{path}: exactly one of levels, thermal, uniform is required, got "
            f"{kinds or 'none'}{_line_of(text, path.rsplit('.', 1)[-1])}"
        )
    kind = kinds[0]
    body = r.raw(kind)
    if kind == "levels":
        if not isinstance(body, list) or not body:
            r.fail("levels", "expected a non-empty list of {energy_ev|energy_joule, weight}")
        levels = []
        for i, item in enumerate(body):
            lr = _Reader(item, f"{path}.levels[{i}]", text)
            energy = lr.one_of(
                {"energy_ev": ("eV", units.ev_to_joule), "energy_joule": ("J", float)},
                "the level energy",
            )
            weight = lr.number("weight", "dimensionless (|c_n|^2)")
            if weight < 0:
                lr.fail("weight", f"must be >= 0, got {weight!r}")
            lr.finish()
            levels.append({"energy_joule": energy, "weight": weight})
        total = math.fsum(lv["weight"] for lv in levels)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ScenarioValidationError(
                f"{path}.levels: weights must sum to 1, got sum {total:.15g}"
                + _line_of(text, "levels")
            )
        out = {"levels": levels}
    elif kind == "thermal":
        tr = _Reader(body, f"{path}.thermal", text)
        hw = tr.one_of(
            {"hbar_omega_ev": ("eV", units.ev_to_joule), "hbar_omega_joule": ("J", float)},
            "the oscillator quantum", positive=True,
        )
        T = _temperature(tr, constants)
        eps = tr.number("tail_eps", "dimensionless", default=1e-12)
        if not 0 < eps < 1:
            tr.fail("tail_eps", f"must lie in (0, 1), got {eps!r}")
        tr.finish()
        out = {"thermal": {"hbar_omega_joule": hw, "temperature_k": T, "tail_eps": eps}}
    else:
        ur = _Reader(body, f"{path}.uniform", text)
        count = ur.integer("count")
        spacing = ur.one_of(
            {"spacing_ev": ("eV", units.ev_to_joule), "spacing_joule": ("J", float)},
            "the level spacing",
        )
        if count > 1 and not spacing > 0:
            ur.fail("spacing_ev" if ur.has("spacing_ev") else "spacing_joule", "level spacing must be > 0")
        ur.finish()
        out = {"uniform": {"count": count, "spacing_joule": spacing}}
    r.finish()
    return out


def _temperature(r: _Reader, constants, positive: bool = True) -> float:
    def from_kT(e):
        return units.temperature_from_energy(units.ev_to_joule(e), constants)

    return r.one_of(
        {"temperature_k": ("K", float), "thermal_energy_ev": ("eV (k_B T)", from_kT)},
        "the temperature", positive=positive,
    )


def _build_state(spec: dict, constants) -> InternalSpectrum | MixtureEnsemble:
    if "mixture" in spec:
        return MixtureEnsemble(
            np.array([c["p"] for c in spec["mixture"]]),
            tuple(_build_state(c["spectrum"], constants) for c in spec["mixture"]),
        )
    if "levels" in spec:
        return InternalSpectrum.from_levels(
            [(lv["energy_joule"], lv["weight"]) for lv in spec["levels"]]
        )
    if "thermal" in spec:
        th = spec["thermal"]
        return thermal_oscillator_spectrum(
            th["hbar_omega_joule"], th["temperature_k"], th["tail_eps"], constants
        )
    un = spec["uniform"]
    return uniform_spectrum(un["count"], un["spacing_joule"])


# -- top level -------------------------------------------------------------

_TOP_KEYS = {"name", "spectrum", "mixture", "geometry", "subsystems", "bath", "grid", "constants"}


def parse_scenario(
    document: str | dict, constants_mode: str | None = None, *, text: str | None = None
) -> Scenario:
    """Validate a scenario document and convert it to SI.

    Parameters
    ----------
    document : str or dict
        JSON text or an already decoded object.
    constants_mode : {"codata", "paper"}, optional
        Overrides the document's ``constants`` key.

    Raises
    ------
    ScenarioParseError
        Malformed JSON.
    ScenarioValidationError
        Unknown keys, missing or conflicting unit keys, out-of-range values,
        unnormalized weights. Messages name the key, its expected unit and,
        when the source text is known, its line.
    """
    if isinstance(document, str):
        text = document
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    else:
        obj = document
    r = _Reader(obj, "", text)

    mode = r.raw("constants", "codata")
    if constants_mode is not None:
        mode = constants_mode
    if mode not in units.CONSTANT_MODES:
        r.fail("constants", f"expected 'codata' or 'paper', got {mode!r}")
    constants = units.get_constants(mode)

    name = r.raw("name")
    if name is not None and not isinstance(name, str):
        r.fail("name", "expected a string")

    if r.has("spectrum") == r.has("mixture"):
        raise ScenarioValidationError(
            "document: exactly one of 'spectrum' or 'mixture' is required"
        )
    if r.has("spectrum"):
        spectrum = _parse_spectrum(r.raw("spectrum"), "spectrum", text, constants)
    else:
        components = r.raw("mixture")
        if not isinstance(components, list) or not components:
            r.fail("mixture", "expected a non-empty list of {p, spectrum}")
        parsed = []
        for i, item in enumerate(components):
            cr = _Reader(item, f"mixture[{i}]", text)
            p = cr.number("p", "probability")
            if p < 0:
                cr.fail("p", f"must be >= 0, got {p!r}")
            spec = _parse_spectrum(cr.raw("spectrum"), f"mixture[{i}].spectrum", text, constants)
            cr.finish()
            parsed.append({"p": p, "spectrum": spec})
        total = math.fsum(c["p"] for c in parsed)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ScenarioValidationError(
                f"mixture: probabilities must sum to 1, got sum {total:.15g}"
                + _line_of(text, "mixture")
            )
        spectrum = {"mixture": parsed}

    if not r.has("geometry"):
        raise ScenarioValidationError(
            "document: missing 'geometry' {g_m_s2, delta_x_m|delta_x_cm, reference_x_m}"
        )
    gr = _Reader(r.raw("geometry"), "geometry", text)
    g = gr.one_of(
        {"g_m_s2": ("m/s^2", float), "g_cm_s2": ("cm/s^2", units.cm_to_m)},
        "the gravitational acceleration", required=False,
    )
    if g is None:
        g = constants.g_earth
    dx = gr.one_of(
        {"delta_x_m": ("m", float), "delta_x_cm": ("cm", units.cm_to_m)},
        "the path separation",
    )
    x0 = gr.one_of(
        {"reference_x_m": ("m", float), "reference_x_cm": ("cm", units.cm_to_m)},
        "the reference height", required=False,
    )
    gr.finish()
    geometry = SuperpositionGeometry(g, dx, 0.0 if x0 is None else x0)

    subsystems = r.integer("subsystems", default=1)

    bath = None
    equilibrium = False
    if r.has("bath"):
        br = _Reader(r.raw("bath"), "bath", text)
        n = br.one_of(
            {"density_per_m3": ("m^-3", float), "density_per_cm3": ("cm^-3", units.per_cm3_to_per_m3)},
            "the scatterer density", positive=True,
        )
        sigma = br.one_of(
            {"sigma_m2": ("m^2", float), "sigma_cm2": ("cm^2", units.cm2_to_m2)},
            "the cross section", positive=True,
        )
        mass = br.one_of(
            {
                "mass_kg": ("kg", float),
                "mass_ev_c2": ("eV/c^2", lambda m: units.mass_ev_per_c2_to_kg(m, constants)),
            },
            "the scatterer mass", positive=True,
        )
        T = _temperature(br, constants, positive=True)
        equilibrium = br.raw("equilibrium", False)
        if not isinstance(equilibrium, bool):
            br.fail("equilibrium", "expected true or false")
        br.finish()
        bath = CollisionalBath(n, sigma, mass, T)

    grid = None
    if r.has("grid"):
        tr = _Reader(r.raw("grid"), "grid", text)
        start = tr.number("start_s", "s", default=0.0)
        stop = tr.number("stop_s", "s")
        count = tr.integer("count")
        spacing = tr.raw("spacing", "linear")
        if spacing not in ("linear", "log"):
            tr.fail("spacing", f"expected 'linear' or 'log', got {spacing!r}")
        if start < 0:
            tr.fail("start_s", f"must be >= 0 s, got {start!r}")
        if stop < start:
            tr.fail("stop_s", f"must be >= start_s, got {stop!r} < {start!r}")
        if spacing == "log" and not start > 0:
            tr.fail("start_s", "log spacing requires start_s > 0")
        if count > 1 and stop == start:
            tr.fail("stop_s", "a grid of more than one point needs stop_s > start_s")
        tr.finish()
        grid = GridSpec(start, stop, count, spacing)

    r.finish()
    return Scenario(
        spectrum=spectrum,
        geometry=geometry,
        subsystems=subsystems,
        bath=bath,
        bath_equilibrium=equilibrium,
        grid=grid,
        constants_mode=mode,
        name=name,
    )


def scenario_to_dict(s: Scenario) -> dict:
    """Normalized SI document for ``s``; round-trips through :func:`parse_scenario`."""
    doc: dict[str, Any] = {}
    if s.name is not None:
        doc["name"] = s.name
    doc["constants"] = s.constants_mode
    if "mixture" in s.spectrum:
        doc["mixture"] = s.spectrum["mixture"]
    else:
        doc["spectrum"] = s.spectrum
    doc["geometry"] = {
        "g_m_s2": s.geometry.g,
        "delta_x_m": s.geometry.delta_x,
        "reference_x_m": s.geometry.reference_x,
    }
    doc["subsystems"] = s.subsystems
    if s.bath is not None:
        doc["bath"] = {
            "density_per_m3": s.bath.n,
            "sigma_m2": s.bath.sigma,
            "mass_kg": s.bath.m_scatterer,
            "temperature_k": s.bath.T,
            "equilibrium": s.bath_equilibrium,
        }
    if s.grid is not None:
        doc["grid"] = {
            "start_s": s.grid.start_s,
            "stop_s": s.grid.stop_s,
            "count": s.grid.count,
            "spacing": s.grid.spacing,
        }
    return doc


# -- built-ins -------------------------------------------------------------

# Per-mode spread k_B T = 1/39 eV from a 3-level uniform mode:
# Delta E = spacing * sqrt(2/3)
_ROOM_KT_EV = 1.0 / 39.0
_CUBE_SPACING_EV = _ROOM_KT_EV * math.sqrt(1.5)

_NITROGEN_BATH = {
    "density_per_cm3": 2.5e19,
    "sigma_cm2": 1e-14,
    "mass_ev_c2": 14e9,
    "thermal_energy_ev": _ROOM_KT_EV,
    "equilibrium": True,
}

BUILTIN_SCENARIOS: dict[str, dict] = {
    "two-level": {
        "name": "two-level",
        "spectrum": {"levels": [{"energy_ev": 0.0, "weight": 0.5}, {"energy_ev": 1.0, "weight": 0.5}]},
        "geometry": {"g_m_s2": 9.81, "delta_x_m": 1e-6},
        "grid": {"start_s": 0.0, "stop_s": 4e7, "count": 401, "spacing": "linear"},
    },
    "thermal-cube": {
        "name": "thermal-cube",
        "spectrum": {"uniform": {"count": 3, "spacing_ev": _CUBE_SPACING_EV}},
        "geometry": {"g_m_s2": 9.81, "delta_x_cm": 1e-7},
        "subsystems": 1000,
        "bath": dict(_NITROGEN_BATH),
    },
    "paper-repro": {
        "name": "paper-repro",
        "constants": "paper",
        "spectrum": {"uniform": {"count": 3, "spacing_ev": _CUBE_SPACING_EV}},
        "geometry": {"g_cm_s2": 981.0, "delta_x_cm": 1e-7},
        "subsystems": 1000,
        "bath": dict(_NITROGEN_BATH),
    },
}


def load_scenario(source: str, constants_mode: str | None = None) -> Scenario:
    """Parse a scenario file, or a built-in scenario by name."""
    from pathlib import Path

    path = Path(source)
    if not path.exists() and source in BUILTIN_SCENARIOS:
        return parse_scenario(json.loads(json.dumps(BUILTIN_SCENARIOS[source])), constants_mode)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario {source!r}: {exc.strerror}") from None
    return parse_scenario(text, constants_mode)
