"""
Command line front end.

Subcommands::

    gravdephase trace <scenario.json> [-o out.csv]
    gravdephase report <scenario.json> [-o out.json]
    gravdephase paper-repro [-o out.json]
    gravdephase average <scenario.json> --window-periods W [--samples S]

``<scenario.json>`` may also name a built-in scenario (``two-level``,
``thermal-cube``, ``paper-repro``). The constants set is chosen by
``--constants``, else ``$GRAVDEPHASE_CONSTANTS``, else the document.

Exit status: 0 success, 2 usage, 3 unparseable document, 4 invalid
scenario, 5 numeric-domain error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys

import numpy as np
from scipy import constants as _sc

from . import units
from .collisional import compare_timescales
from .dephasing import (
    DivergentTimescale,
    beat_periods,
    default_samples,
    dephasing_report,
    is_near_commensurate,
    n_subsystem_dephasing_time,
    time_average_analytic,
    time_average_numeric,
    trace,
)
from .scenario import (
    BUILTIN_SCENARIOS,
    GridSpec,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    parse_scenario,
)
from .spectrum import energy_variance

log = logging.getLogger(__name__)

ENV_CONSTANTS = "GRAVDEPHASE_CONSTANTS"

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_NUMERIC = 5

CSV_FLOAT = "{:.16e}"
DEFAULT_GRID_COUNT = 200

PAPER_TARGET_PER_CM3 = 1.2e-5
PAPER_TOLERANCE = 0.01
CODATA_TOLERANCE = 0.03
# ideal gas at 1 atm and 293 K
ATMOSPHERIC_TEMPERATURE_K = 293.0


def resolve_constants_mode(flag: str | None, environ=None) -> str | None:
    """``--constants`` wins over the environment; ``None`` defers to the document."""
    if flag:
        return flag
    environ = os.environ if environ is None else environ
    return environ.get(ENV_CONSTANTS) or None


def default_grid(t_scale: float, count: int = DEFAULT_GRID_COUNT) -> GridSpec:
    """Log grid from ``t_scale / 100`` to ``100 t_scale``."""
    if not (math.isfinite(t_scale) and t_scale > 0):
        raise DivergentTimescale("no finite dephasing time to build a default grid; give 'grid'")
    return GridSpec(t_scale / 100, t_scale * 100, count, "log")


def _n_dephasing_time(s: Scenario) -> float:
    gs = s.grouped()
    return n_subsystem_dephasing_time(energy_variance(gs), s.subsystems, s.geometry, s.constants)


def run_trace(s: Scenario) -> str:
    """CSV text: ``t_s,visibility,small_time_approx[,visibility_N]``."""
    grid = s.grid
    if grid is None:
        try:
            grid = default_grid(_n_dephasing_time(s))
        except DivergentTimescale as exc:
            raise DivergentTimescale(f"{exc}; cannot build a default grid, give 'grid'") from None
    tr = trace(s.grouped(), s.geometry, grid.times(), s.constants, N=s.subsystems)
    columns = [tr.times, tr.visibility, tr.small_time_approx]
    header = ["t_s", "visibility", "small_time_approx"]
    if tr.visibility_n is not None:
        columns.append(tr.visibility_n)
        header.append("visibility_N")
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in zip(*columns):
        out.write(",".join(CSV_FLOAT.format(float(v)) for v in row) + "\n")
    return out.getvalue()


def render_density(n_per_cm3: float) -> str:
    """Two-significant-figure rendering, e.g. ``1.2e-5 cm^-3``."""
    mantissa, exponent = f"{n_per_cm3:.1e}".split("e")
    return f"{mantissa}e{int(exponent)} cm^-3"


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def run_report(s: Scenario) -> dict:
    """Timescales, long-time bounds and, with a bath, the crossover."""
    gs = s.grouped()
    rep = dephasing_report(gs, s.geometry, s.subsystems, s.constants)
    out = {
        "constants": s.constants_mode,
        "t_d_s": _finite_or_none(rep.t_D),
        "t_nd_s": _finite_or_none(rep.t_ND),
        "purity_sum": rep.purity_sum,
        "lower_bound_log": rep.lower_bound_log,
    }
    if s.subsystems > 1:
        out["n_subsystem_model"] = "independent-subsystem assumption"
    if s.bath is not None:
        try:
            cr = compare_timescales(
                s.subsystems, s.geometry, s.bath,
                delta_E_single=energy_variance(gs),
                equilibrium=s.bath_equilibrium,
                constants=s.constants,
            )
        except DivergentTimescale:
            # nothing to dephase: collisions always win
            from .collisional import collisional_time

            t_coll = collisional_time(s.bath, s.geometry.delta_x, s.constants)
            out.update(t_coll_s=t_coll, n_crossover_per_m3=0.0, n_crossover_per_cm3=0.0,
                       gravitational_dominates=False)
        else:
            out.update(
                t_coll_s=cr.t_coll,
                n_crossover_per_m3=cr.n_crossover,
                n_crossover_per_cm3=cr.n_crossover_per_cm3,
                n_crossover_rendered=render_density(cr.n_crossover_per_cm3),
                gravitational_dominates=cr.gravitational_dominates,
            )
            if s.bath_equilibrium:
                out["t_nd_equilibrium_s"] = cr.t_ND
    return out


def atmospheric_density_per_cm3(T: float = ATMOSPHERIC_TEMPERATURE_K) -> float:
    """Ideal-gas number density at 1 atm, cm^-3."""
    return units.per_m3_to_per_cm3(_sc.atm / (_sc.k * T))


def run_paper_repro() -> dict:
    """Reproduce the crossover density estimate with the rounded constants.

    Also repeats the computation with CODATA constants as a drift check.
    """
    doc = BUILTIN_SCENARIOS["paper-repro"]
    s = parse_scenario(json.loads(json.dumps(doc)))
    cr = compare_timescales(s.subsystems, s.geometry, s.bath, equilibrium=True, constants=s.constants)
    rep = dephasing_report(s.grouped(), s.geometry, s.subsystems, s.constants)

    n_cm3 = cr.n_crossover_per_cm3
    rel = abs(n_cm3 - PAPER_TARGET_PER_CM3) / PAPER_TARGET_PER_CM3
    n_atm = atmospheric_density_per_cm3()
    ratio = n_cm3 / n_atm

    s_codata = parse_scenario(json.loads(json.dumps(doc)), "codata")
    cr_codata = compare_timescales(
        s_codata.subsystems, s_codata.geometry, s_codata.bath, equilibrium=True,
        constants=s_codata.constants,
    )
    rel_codata = abs(cr_codata.n_crossover_per_cm3 - PAPER_TARGET_PER_CM3) / PAPER_TARGET_PER_CM3

    c = s.constants
    return {
        "constants": s.constants_mode,
        "inputs": {
            "sigma_cm2": doc["bath"]["sigma_cm2"],
            "subsystems": s.subsystems,
            "thermal_energy_ev": doc["bath"]["thermal_energy_ev"],
            "delta_x_cm": doc["geometry"]["delta_x_cm"],
            "mass_ev_c2": doc["bath"]["mass_ev_c2"],
            "g_cm_s2": doc["geometry"]["g_cm_s2"],
            "hbar_ev_s": units.joule_to_ev(c.hbar),
            "c_cm_s": c.c * 100.0,
        },
        "n_crossover_per_m3": cr.n_crossover,
        "n_crossover_per_cm3": n_cm3,
        "n_crossover_rendered": render_density(n_cm3),
        "target_per_cm3": PAPER_TARGET_PER_CM3,
        "relative_error": rel,
        "tolerance": PAPER_TOLERANCE,
        "pass": rel <= PAPER_TOLERANCE,
        "t_nd_s": cr.t_ND,
        "t_coll_s": cr.t_coll,
        "gravitational_dominates": cr.gravitational_dominates,
        "lower_bound_log": rep.lower_bound_log,
        "lower_bound_log10": rep.lower_bound_log / math.log(10),
        "n_atmospheric_per_cm3": n_atm,
        "atmospheric_ratio": ratio,
        "atmospheric_ratio_log10": math.log10(ratio),
        "atmospheric_ratio_pass": abs(math.log10(ratio) + 24) <= 1,
        "codata_check": {
            "n_crossover_per_cm3": cr_codata.n_crossover_per_cm3,
            "relative_error": rel_codata,
            "tolerance": CODATA_TOLERANCE,
            "pass": rel_codata <= CODATA_TOLERANCE,
        },
    }


def run_average(s: Scenario, window_periods: float, samples: int | None = None) -> dict:
    """Numeric long-time average of ``V^2`` against the purity sum."""
    gs = s.grouped()
    analytic = time_average_analytic(gs)
    slowest, _ = beat_periods(gs, s.geometry, s.constants)
    if math.isinf(slowest):
        return {
            "window_periods": window_periods, "window_s": None, "samples": 0,
            "numeric": 1.0, "analytic": analytic, "abs_error": abs(1.0 - analytic),
            "near_commensurate": False,
        }
    window = window_periods * slowest
    if samples is None:
        samples = default_samples(gs, s.geometry, window, s.constants)
    numeric = time_average_numeric(gs, s.geometry, window, samples, s.constants)
    return {
        "window_periods": window_periods,
        "window_s": window,
        "samples": samples,
        "numeric": numeric,
        "analytic": analytic,
        "abs_error": abs(numeric - analytic),
        "near_commensurate": is_near_commensurate(gs),
    }


def render_json(d: dict) -> str:
    return json.dumps(d, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravdephase",
        description="Gravitational time-dilation dephasing of mesoscopic superpositions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name, help_text, default_out):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help=f"scenario JSON file or built-in name ({', '.join(BUILTIN_SCENARIOS)})")
        p.add_argument("-o", "--output", help=f"write to this file instead of stdout (e.g. {default_out})")
        p.add_argument("--constants", choices=sorted(units.CONSTANT_MODES))
        return p

    scenario_command("trace", "visibility time series as CSV", "out.csv")
    scenario_command("report", "timescales and bounds as JSON", "out.json")
    p = scenario_command("average", "numeric long-time average of V^2", "out.json")
    p.add_argument("--window-periods", type=float, required=True,
                   help="averaging window in slowest beat periods (>= 10)")
    p.add_argument("--samples", type=int, help="quadrature points (default: 20 per fastest beat)")

    p = sub.add_parser("paper-repro", help="reproduce the crossover-density estimate")
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "paper-repro":
            _emit(render_json(run_paper_repro()), args.output)
            return EXIT_OK
        mode = resolve_constants_mode(args.constants)
        s = load_scenario(args.scenario, mode)
        log.debug("loaded scenario %r with %s constants", s.name or args.scenario, s.constants_mode)
        if args.command == "trace":
            _emit(run_trace(s), args.output)
        elif args.command == "report":
            _emit(render_json(run_report(s)), args.output)
        else:
            _emit(render_json(run_average(s, args.window_periods, args.samples)), args.output)
    except ScenarioParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        # DivergentTimescale and other domain errors from the numerics
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
