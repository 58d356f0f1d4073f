"""
Internal energy spectra: pure superpositions, mixtures and thermal ensembles.

Only the level populations ``|c_n|^2`` enter the visibility, so a spectrum
stores energies together with non-negative weights summing to one. Phases of
the amplitudes are never needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .units import CODATA, PhysicalConstants, thermal_energy

__all__ = [
    "NORMALIZATION_TOL",
    "InternalSpectrum",
    "MixtureEnsemble",
    "GroupedSpectrum",
    "mean_energy",
    "energy_variance",
    "purity_sum",
    "default_tolerance",
    "group_degenerate",
    "as_grouped",
    "thermal_oscillator_spectrum",
    "thermal_variance",
    "uniform_spectrum",
    "effective_spectrum",
]

NORMALIZATION_TOL = 1e-12


def _check_weights(weights, what="weights"):
    if np.any(~np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError(f"{what} must be finite and >= 0")
    total = math.fsum(weights)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{what} must sum to 1, got sum {total!r}")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class InternalSpectrum:
    """Energy levels ``E_n`` (J) with populations ``w_n = |c_n|^2``.

    Levels may repeat; use :func:`group_degenerate` to merge them.
    """

    energies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        energies = _frozen_array(self.energies)
        weights = _frozen_array(self.weights)
        if energies.size == 0:
            raise ValueError("a spectrum needs at least one level")
        if energies.shape != weights.shape:
            raise ValueError(
                f"{energies.size} energies but {weights.size} weights"
            )
        if not np.all(np.isfinite(energies)):
            raise ValueError("energies must be finite")
        _check_weights(weights)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_levels(cls, levels: Sequence[tuple[float, float]]) -> InternalSpectrum:
        """Build from ``[(E_n, w_n), ...]`` pairs."""
        levels = list(levels)
        if not levels:
            raise ValueError("a spectrum needs at least one level")
        energies, weights = zip(*levels)
        return cls(np.asarray(energies, float), np.asarray(weights, float))

    @classmethod
    def single(cls, energy: float = 0.0) -> InternalSpectrum:
        return cls(np.array([energy]), np.array([1.0]))

    @property
    def levels(self) -> list[tuple[float, float]]:
        return list(zip(self.energies.tolist(), self.weights.tolist()))

    def __len__(self):
        return self.energies.size

    def __eq__(self, other):
        if not isinstance(other, InternalSpectrum):
            return NotImplemented
        return np.array_equal(self.energies, other.energies) and np.array_equal(
            self.weights, other.weights
        )

    def shifted(self, offset: float) -> InternalSpectrum:
        """Same populations, all energies moved by ``offset``."""
        return InternalSpectrum(self.energies + offset, self.weights)


@dataclass(frozen=True, eq=False)
class MixtureEnsemble:
    """Statistical mixture of spectra, component ``a`` with probability ``p_a``."""

    probabilities: np.ndarray
    components: tuple[InternalSpectrum, ...]

    def __post_init__(self):
        probabilities = _frozen_array(self.probabilities)
        components = tuple(self.components)
        if not components:
            raise ValueError("a mixture needs at least one component")
        if probabilities.size != len(components):
            raise ValueError(
                f"{probabilities.size} probabilities but {len(components)} components"
            )
        _check_weights(probabilities, "mixture probabilities")
        object.__setattr__(self, "probabilities", probabilities)
        object.__setattr__(self, "components", components)

    def __eq__(self, other):
        if not isinstance(other, MixtureEnsemble):
            return NotImplemented
        return np.array_equal(self.probabilities, other.probabilities) and (
            self.components == other.components
        )

    def flattened(self) -> InternalSpectrum:
        """All component levels in one spectrum with weights ``p_a |c_n^a|^2``."""
        energies = np.concatenate([s.energies for s in self.components])
        weights = np.concatenate(
            [p * s.weights for p, s in zip(self.probabilities, self.components)]
        )
        # p_a-scaled weights can drift from 1 by a few ulps
        return InternalSpectrum(energies, weights / math.fsum(weights))


@dataclass(frozen=True, eq=False)
class GroupedSpectrum:
    """Spectrum with distinct energies, one total weight per energy.

    ``tolerance`` records the merge tolerance that produced it. Group
    energies are strictly increasing with gaps larger than the tolerance.
    """

    energies: np.ndarray
    weights: np.ndarray
    tolerance: float = 0.0

    def __post_init__(self):
        energies = _frozen_array(self.energies)
        weights = _frozen_array(self.weights)
        if energies.size == 0:
            raise ValueError("a grouped spectrum needs at least one group")
        if energies.shape != weights.shape:
            raise ValueError(f"{energies.size} energies but {weights.size} weights")
        if not np.all(np.isfinite(energies)):
            raise ValueError("energies must be finite")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        if np.any(np.diff(energies) <= self.tolerance):
            raise ValueError(
                "group energies must be strictly increasing with gaps > tolerance"
            )
        _check_weights(weights)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.energies.size

    def __eq__(self, other):
        if not isinstance(other, GroupedSpectrum):
            return NotImplemented
        return (
            np.array_equal(self.energies, other.energies)
            and np.array_equal(self.weights, other.weights)
            and self.tolerance == other.tolerance
        )

    def as_spectrum(self) -> InternalSpectrum:
        return InternalSpectrum(self.energies, self.weights)


def mean_energy(s: InternalSpectrum | GroupedSpectrum) -> float:
    """Population-weighted mean energy ``sum_n w_n E_n`` in J."""
    return float(np.dot(s.weights, s.energies))


def energy_variance(
    s: InternalSpectrum | GroupedSpectrum | MixtureEnsemble,
    centering: str = "grand",
) -> float:
    """Energy spread ``Delta E`` (standard deviation, J).

    For a :class:`MixtureEnsemble` the squared offsets are weighted by
    ``p_a |c_n^a|^2``. With ``centering="grand"`` (default) offsets are taken
    from the grand mean, which makes ``Delta E`` the spread of the effective
    population that actually drives the visibility. ``centering="component"``
    measures each component about its own mean instead, dropping the
    between-component spread.
    """
    if isinstance(s, MixtureEnsemble):
        if centering == "grand":
            return energy_variance(s.flattened())
        if centering == "component":
            var = sum(
                p * energy_variance(comp) ** 2
                for p, comp in zip(s.probabilities, s.components)
            )
            return math.sqrt(var)
        raise ValueError(f"centering must be 'grand' or 'component', got {centering!r}")
    offsets = s.energies - mean_energy(s)
    return math.sqrt(float(np.dot(s.weights, offsets**2)))


def purity_sum(g: GroupedSpectrum) -> float:
    """Sum of squared group weights, ``sum_n |c_n|^4``; lies in (0, 1]."""
    return float(np.dot(g.weights, g.weights))


def default_tolerance(s: InternalSpectrum) -> float:
    """Degeneracy tolerance used when none is given.

    ``1e-12 * (max|E_n| + Delta E)``: merges only levels equal to roughly
    machine precision on the spectrum's own scale.
    """
    return 1e-12 * (float(np.max(np.abs(s.energies))) + energy_variance(s))


def group_degenerate(s: InternalSpectrum, tol: float | None = None) -> GroupedSpectrum:
    """Merge (near-)degenerate levels.

    Levels are sorted by energy and scanned once; a new group starts whenever
    the gap to the previous level exceeds ``tol`` (single linkage). Each group
    carries the summed weight and the weight-averaged energy of its members.

    Parameters
    ----------
    s : InternalSpectrum
    tol : float, optional
        Merge tolerance in J. Defaults to :func:`default_tolerance`.
    """
    if tol is None:
        tol = default_tolerance(s)
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol!r}")
    order = np.argsort(s.energies, kind="stable")
    energies = s.energies[order]
    weights = s.weights[order]

    breaks = np.flatnonzero(np.diff(energies) > tol) + 1
    starts = np.concatenate(([0], breaks))
    group_w = np.add.reduceat(weights, starts)
    group_e = np.empty_like(group_w)
    for k, (lo, hi) in enumerate(zip(starts, np.append(breaks, energies.size))):
        w = weights[lo:hi]
        e = energies[lo:hi]
        total = w.sum()
        # zero-weight clusters keep their midpoint
        rep = np.dot(w, e) / total if total > 0 else 0.5 * (e[0] + e[-1])
        group_e[k] = min(max(rep, e[0]), e[-1])
    return GroupedSpectrum(group_e, group_w, float(tol))


def as_grouped(s, tol: float | None = None) -> GroupedSpectrum:
    """Coerce a spectrum or mixture to a :class:`GroupedSpectrum`."""
    if isinstance(s, GroupedSpectrum):
        return s
    if isinstance(s, MixtureEnsemble):
        return effective_spectrum(s, tol)
    return group_degenerate(s, tol)


def thermal_oscillator_spectrum(
    hbar_omega: float,
    T: float,
    tail_eps: float = 1e-12,
    constants: PhysicalConstants = CODATA,
    max_levels: int = 10_000_000,
) -> InternalSpectrum:
    """Boltzmann-populated harmonic ladder ``E_k = k hbar_omega``.

    Weights are geometric, ``w_k = (1 - r) r^k`` with
    ``r = exp(-hbar_omega / k_B T)``, truncated at the smallest level count
    ``K`` whose discarded tail mass ``r^K`` is below ``tail_eps`` and then
    renormalized.

    Parameters
    ----------
    hbar_omega : float
        Level spacing, J.
    T : float
        Temperature, K.
    tail_eps : float
        Allowed discarded probability, in (0, 1).
    max_levels : int
        Guard against accidentally huge ladders in the classical limit.
    """
    if not hbar_omega > 0:
        raise ValueError(f"hbar_omega must be > 0, got {hbar_omega!r}")
    if not T > 0:
        raise ValueError(f"temperature must be > 0, got {T!r}")
    if not 0 < tail_eps < 1:
        raise ValueError(f"tail_eps must lie in (0, 1), got {tail_eps!r}")

    x = hbar_omega / thermal_energy(T, constants)
    # r^K < eps  <=>  K > ln(eps) / ln(r) = -ln(eps) / x
    n_levels = math.floor(-math.log(tail_eps) / x) + 1
    if n_levels > max_levels:
        raise ValueError(
            f"truncated ladder needs {n_levels} levels (> max_levels={max_levels}); "
            "raise tail_eps or max_levels"
        )
    k = np.arange(n_levels, dtype=float)
    log_w = -x * k
    weights = np.exp(log_w - log_w.max())
    weights /= math.fsum(weights)
    return InternalSpectrum(k * hbar_omega, weights)


def thermal_variance(N: int, T: float, constants: PhysicalConstants = CODATA) -> float:
    """Thermal energy spread ``sqrt(N) k_B T`` of ``N`` degrees of freedom, J."""
    if N < 1:
        raise ValueError(f"need N >= 1 degrees of freedom, got {N!r}")
    return math.sqrt(N) * thermal_energy(T, constants)


def uniform_spectrum(count: int, spacing: float, offset: float = 0.0) -> InternalSpectrum:
    """``count`` equally populated, equally spaced levels starting at ``offset``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count!r}")
    if count > 1 and not spacing > 0:
        raise ValueError(f"spacing must be > 0, got {spacing!r}")
    energies = offset + spacing * np.arange(count, dtype=float)
    return InternalSpectrum(energies, np.full(count, 1.0 / count))


def effective_spectrum(m: MixtureEnsemble, tol: float | None = None) -> GroupedSpectrum:
    """Grouped effective populations ``w_n = sum_a p_a |c_n^a|^2`` of a mixture.

    The off-diagonal element is linear in the populations, so a mixture
    behaves exactly like this single spectrum.
    """
    return group_degenerate(m.flattened(), tol)
