"""
Gravitational time-dilation dephasing of a two-path superposition.

A body whose internal state spreads over energies ``E_n`` with populations
``w_n``, held in superposition at two heights separated by ``delta_x``,
has centre-of-mass coherence

    rho_12(t) = 1/2 * sum_n w_n exp(-i E_n t g delta_x / (hbar c^2))

and visibility ``V(t) = 2 |rho_12(t)|``. Everything here is a pure function
of immutable inputs; time arguments broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from .spectrum import GroupedSpectrum, as_grouped, energy_variance, purity_sum
from .units import CODATA, PhysicalConstants

__all__ = [
    "DivergentTimescale",
    "SuperpositionGeometry",
    "VisibilityTrace",
    "DephasingReport",
    "phase_rates",
    "internal_phase",
    "gravitational_phase",
    "offdiag_element",
    "visibility",
    "visibility_deficit",
    "dephasing_time",
    "small_time_visibility",
    "compose_independent",
    "gaussian_visibility",
    "n_subsystem_dephasing_time",
    "beat_periods",
    "is_near_commensurate",
    "time_average_analytic",
    "default_samples",
    "time_average_numeric",
    "lower_bound_log",
    "reversed_field_roundtrip",
    "trace",
    "dephasing_report",
]

#: Minimum quadrature resolution, samples per fastest beat period.
SAMPLES_PER_FASTEST_PERIOD = 20
#: Shortest meaningful averaging window, in slowest beat periods.
MIN_WINDOW_PERIODS = 10


class DivergentTimescale(ValueError):
    """Raised when a requested timescale is infinite (nothing to dephase).

    ``timescale`` is always ``math.inf`` so callers that prefer a number can
    catch and use it.
    """

    timescale = math.inf


@dataclass(frozen=True)
class SuperpositionGeometry:
    """Two-path geometry in a uniform field.

    Attributes
    ----------
    g : float
        Gravitational acceleration, m/s^2. A negative value reverses the field.
    delta_x : float
        Signed height difference ``x_1 - x_2`` of the two paths, m.
    reference_x : float
        Mean height, m; only enters :func:`internal_phase`.
    """

    g: float
    delta_x: float
    reference_x: float = 0.0

    def __post_init__(self):
        for field in ("g", "delta_x", "reference_x"):
            if not math.isfinite(getattr(self, field)):
                raise ValueError(f"{field} must be finite")

    def reversed(self) -> SuperpositionGeometry:
        """Same geometry in the opposite field."""
        return SuperpositionGeometry(-self.g, self.delta_x, self.reference_x)

    def redshift(self, constants: PhysicalConstants = CODATA) -> float:
        """Dimensionless height-difference factor ``g delta_x / c^2``."""
        return self.g * self.delta_x / constants.c**2


@dataclass(frozen=True, eq=False)
class VisibilityTrace:
    times: np.ndarray
    visibility: np.ndarray
    small_time_approx: np.ndarray
    t_D: float
    visibility_n: np.ndarray | None = None
    n_subsystems: int = 1


@dataclass(frozen=True)
class DephasingReport:
    """Timescales and long-time bounds for one spectrum and geometry.

    ``lower_bound_log`` is the natural log of ``(sum w^2)^N``.
    """

    t_D: float
    t_ND: float
    purity_sum: float
    lower_bound_log: float
    n_subsystems: int = 1


def phase_rates(
    g_spec, geom: SuperpositionGeometry, constants: PhysicalConstants = CODATA,
    centered: bool = True,
) -> np.ndarray:
    """Angular frequencies (rad/s) of the level phasors in ``rho_12``.

    With ``centered`` the energies are measured from the mean, which leaves
    ``|rho_12|`` unchanged but keeps the phases small.
    """
    gs = as_grouped(g_spec)
    energies = gs.energies - np.dot(gs.weights, gs.energies) if centered else gs.energies
    # (E/hbar) and (g dx / c^2) formed separately, then multiplied
    return (energies / constants.hbar) * geom.redshift(constants)


def internal_phase(E_n, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """Total phase ``E_n t (1 + g x / c^2) / hbar`` of a level at ``reference_x``.

    The gravitational part is ~1e-16 of the total on laboratory scales and is
    lost to rounding in the sum; use :func:`gravitational_phase` to get it
    separately.
    """
    t = np.asarray(t, dtype=float)
    flat = (np.asarray(E_n, dtype=float) / constants.hbar) * t
    return flat * (1.0 + geom.g * geom.reference_x / constants.c**2)


def gravitational_phase(E_n, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """Gravitational part ``E_n t g x / (hbar c^2)`` of :func:`internal_phase`."""
    t = np.asarray(t, dtype=float)
    factor = geom.g * geom.reference_x / constants.c**2
    return (np.asarray(E_n, dtype=float) / constants.hbar) * factor * t


def _phasor_sum(weights, rates, t):
    t = np.asarray(t, dtype=float)
    phases = np.multiply.outer(t, rates)
    return np.exp(-1j * phases) @ weights


def offdiag_element(g_spec, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """Off-diagonal element ``rho_12(t)`` with uncentered energies.

    ``|rho_12| <= 1/2``; equals ``1/2`` at ``t = 0``.
    """
    gs = as_grouped(g_spec)
    rates = phase_rates(gs, geom, constants, centered=False)
    return 0.5 * _phasor_sum(gs.weights, rates, t)


def visibility(g_spec, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """Interferometric visibility ``2 |rho_12(t)|`` in [0, 1].

    Evaluated with mean-centred phases, which give the same modulus as
    :func:`offdiag_element` at far better precision.
    """
    gs = as_grouped(g_spec)
    rates = phase_rates(gs, geom, constants)
    phases = np.multiply.outer(np.asarray(t, dtype=float), rates)
    v = np.abs(np.exp(-1j * phases) @ gs.weights)
    # all phases zero: the modulus is the weight sum, 1 by normalization
    return np.where(np.all(phases == 0, axis=-1), 1.0, np.minimum(v, 1.0))[()]


def visibility_deficit(g_spec, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """``1 - V(t)`` without cancellation error at small ``t``.

    Uses ``1 - V^2 = 2 sum_{n,m} w_n w_m sin^2(Omega_nm t / 2)`` with the
    beat frequencies ``Omega_nm``, then ``1 - V = (1 - V^2) / (1 + V)``.
    """
    gs = as_grouped(g_spec)
    rates = phase_rates(gs, geom, constants)
    beats = np.subtract.outer(rates, rates)
    ww = np.outer(gs.weights, gs.weights)
    t = np.asarray(t, dtype=float)
    s = np.sin(0.5 * np.multiply.outer(t, beats))
    loss = 2.0 * np.einsum("...nm,nm->...", s * s, ww)
    loss = np.clip(loss, 0.0, 1.0)
    return loss / (1.0 + np.sqrt(1.0 - loss))


def dephasing_time(delta_E: float, geom: SuperpositionGeometry, constants: PhysicalConstants = CODATA) -> float:
    """Phase evolution timescale ``sqrt(2) hbar c^2 / (g Delta E |delta_x|)``, s.

    Raises
    ------
    DivergentTimescale
        If ``delta_E``, ``g`` or ``delta_x`` is zero.
    """
    if delta_E < 0:
        raise ValueError(f"energy spread must be >= 0, got {delta_E!r}")
    rate = abs(geom.g) * delta_E * abs(geom.delta_x)
    if rate == 0:
        raise DivergentTimescale(
            "no dephasing: energy spread, g or delta_x is zero"
        )
    return math.sqrt(2.0) * constants.hbar * constants.c**2 / rate


def small_time_visibility(t, t_D: float):
    """Quadratic short-time form ``max(0, 1 - t^2 / t_D^2)``."""
    if not t_D > 0:
        raise ValueError(f"t_D must be > 0, got {t_D!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be >= 0")
    return np.maximum(0.0, 1.0 - (t / t_D) ** 2)


def compose_independent(V_single: Callable, N: int) -> Callable:
    """Visibility of ``N`` independent identical subsystems, ``V_single(t)**N``.

    This is the exact product, not the Gaussian approximation
    (see :func:`gaussian_visibility`).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    if N == 1:
        return V_single

    def V_N(t):
        return np.power(V_single(t), N)

    return V_N


def gaussian_visibility(t, t_ND: float):
    """Large-``N`` short-time form ``exp(-t^2 / t_ND^2)``."""
    t = np.asarray(t, dtype=float)
    return np.exp(-((t / t_ND) ** 2))


def n_subsystem_dephasing_time(
    delta_E_single: float, N: int, geom: SuperpositionGeometry,
    constants: PhysicalConstants = CODATA,
) -> float:
    """``t_ND``: :func:`dephasing_time` with the spread scaled by ``sqrt(N)``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    return dephasing_time(math.sqrt(N) * delta_E_single, geom, constants)


def beat_periods(g_spec, geom: SuperpositionGeometry, constants: PhysicalConstants = CODATA):
    """``(slowest, fastest)`` beat periods in s; ``(inf, inf)`` without beats."""
    gs = as_grouped(g_spec)
    rates = np.sort(phase_rates(gs, geom, constants, centered=False))
    gaps = np.diff(rates)
    gaps = np.abs(gaps[gaps != 0])
    if gaps.size == 0:
        return math.inf, math.inf
    spread = abs(rates[-1] - rates[0])
    return 2 * math.pi / float(gaps.min()), 2 * math.pi / spread


def is_near_commensurate(g_spec, max_denominator: int = 12, rel_tol: float = 1e-3) -> bool:
    """Whether any two level gaps have a ratio close to a small-denominator fraction.

    Finite-window averages converge slowly for such spectra.
    """
    gs = as_grouped(g_spec)
    gaps = np.diff(gs.energies)
    gaps = gaps[gaps > 0]
    for i in range(gaps.size):
        for j in range(i + 1, gaps.size):
            r = float(max(gaps[i], gaps[j]) / min(gaps[i], gaps[j]))
            approx = Fraction(r).limit_denominator(max_denominator)
            if abs(r - float(approx)) <= rel_tol * r:
                return True
    return False


def time_average_analytic(g_spec) -> float:
    """Long-time mean of ``V(t)^2``: the purity sum ``sum_n w_n^2``.

    Valid only for distinct energies, hence the grouping.
    """
    return purity_sum(as_grouped(g_spec))


def _squared_visibility_grid(weights, rates, dt, samples, block_rows=256):
    # t_j = (b*B + k) dt; each phasor is an exact product of a coarse and a
    # fine exponential, so the double sum becomes one matrix product per chunk
    B = max(1, math.isqrt(samples))
    nb = -(-samples // B)
    fine = np.exp(-1j * np.multiply.outer(np.arange(B) * dt, rates))
    out = np.empty(nb * B)
    for b0 in range(0, nb, block_rows):
        b = np.arange(b0, min(nb, b0 + block_rows))
        coarse = np.exp(-1j * np.multiply.outer(b * (B * dt), rates)) * weights
        amp = coarse @ fine.T
        out[b0 * B : (b0 + b.size) * B] = (amp.real**2 + amp.imag**2).ravel()
    return out[:samples]


def default_samples(g_spec, geom: SuperpositionGeometry, window: float, constants: PhysicalConstants = CODATA) -> int:
    """Fewest grid points that resolve the fastest beat over ``window``."""
    _, fastest = beat_periods(g_spec, geom, constants)
    if math.isinf(fastest):
        return 2
    return max(2, math.ceil(SAMPLES_PER_FASTEST_PERIOD * window / fastest) + 1)


def time_average_numeric(
    g_spec, geom: SuperpositionGeometry, window: float, samples: int | None = None,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Brute-force ``(1/window) * int_0^window V(t)^2 dt``.

    Composite trapezoid rule on ``samples`` uniformly spaced points. By
    default the grid resolves the fastest beat with 20 samples per period.
    Converges to :func:`time_average_analytic` as ``window`` grows.

    Raises
    ------
    ValueError
        If ``window`` covers fewer than 10 slowest beat periods, or if
        ``samples`` under-resolves the fastest beat.
    """
    if not window > 0:
        raise ValueError(f"window must be > 0, got {window!r}")
    gs = as_grouped(g_spec)
    slowest, fastest = beat_periods(gs, geom, constants)
    if math.isinf(slowest):
        return 1.0
    if window < MIN_WINDOW_PERIODS * slowest:
        raise ValueError(
            f"window {window:.6g} s is shorter than {MIN_WINDOW_PERIODS} slowest "
            f"beat periods ({MIN_WINDOW_PERIODS * slowest:.6g} s)"
        )
    needed = default_samples(gs, geom, window, constants)
    if samples is None:
        samples = needed
    elif samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples!r}")
    elif samples < needed:
        raise ValueError(
            f"{samples} samples under-resolve the fastest beat; need >= {needed}"
        )
    rates = phase_rates(gs, geom, constants)
    dt = window / (samples - 1)
    v2 = _squared_visibility_grid(gs.weights, rates, dt, samples)
    return float(trapezoid(v2, dx=dt) / window)


def lower_bound_log(g_spec, N: int) -> float:
    """Natural log of the ``N``-subsystem long-time floor ``(sum w^2)^N``.

    Stays in log space; the power itself underflows for realistic ``N``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N!r}")
    return N * math.log(purity_sum(as_grouped(g_spec)))


def reversed_field_roundtrip(g_spec, geom: SuperpositionGeometry, t, constants: PhysicalConstants = CODATA):
    """Visibility after time ``t`` in the field and ``t`` in the reversed field.

    The phases cancel, so the result is 1 up to rounding.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be >= 0")
    gs = as_grouped(g_spec)
    forward = np.exp(-1j * np.multiply.outer(t, phase_rates(gs, geom, constants)))
    back = np.exp(-1j * np.multiply.outer(t, phase_rates(gs, geom.reversed(), constants)))
    # no 1.0 shortcut here: the cancellation itself is what is being measured
    return np.minimum(np.abs((forward * back) @ gs.weights), 1.0)


def trace(
    g_spec, geom: SuperpositionGeometry, t_grid, constants: PhysicalConstants = CODATA,
    N: int = 1,
) -> VisibilityTrace:
    """Exact and short-time visibility on a time grid.

    With ``N > 1`` the trace also carries the ``N``-subsystem visibility
    ``V^N``. The short-time column is compared against the single-system
    ``t_D``.
    """
    times = np.array(t_grid, dtype=float).reshape(-1)
    if times.size == 0:
        raise ValueError("time grid is empty")
    if np.any(times < 0):
        raise ValueError("time grid must be nonnegative")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    gs = as_grouped(g_spec)
    v = visibility(gs, geom, times, constants)
    try:
        t_D = dephasing_time(energy_variance(gs), geom, constants)
        approx = small_time_visibility(times, t_D)
    except DivergentTimescale:
        t_D = math.inf
        approx = np.ones_like(times)
    v_n = None
    if N > 1:
        v_n = compose_independent(lambda t: visibility(gs, geom, t, constants), N)(times)
    return VisibilityTrace(times, v, approx, t_D, v_n, N)


def dephasing_report(
    g_spec, geom: SuperpositionGeometry, N: int = 1, constants: PhysicalConstants = CODATA,
) -> DephasingReport:
    """Collect ``t_D``, ``t_ND``, the purity sum and the log lower bound.

    Timescales are ``inf`` when there is nothing to dephase. The N-subsystem
    quantities assume independent subsystems.
    """
    gs = as_grouped(g_spec)
    spread = energy_variance(gs)
    try:
        t_D = dephasing_time(spread, geom, constants)
        t_ND = n_subsystem_dephasing_time(spread, N, geom, constants)
    except DivergentTimescale:
        t_D = t_ND = math.inf
    return DephasingReport(t_D, t_ND, purity_sum(gs), lower_bound_log(gs, N), N)
