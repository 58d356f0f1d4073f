import numpy as np
import pytest

from gravdephase.dephasing import SuperpositionGeometry
from gravdephase.spectrum import GroupedSpectrum, InternalSpectrum
from gravdephase.units import CODATA

EV = 1.602176634e-19


@pytest.fixture
def rng():
    return np.random.default_rng(20140503)


def random_weights(rng, L, uniform=False):
    if uniform:
        return np.full(L, 1.0 / L)
    w = rng.dirichlet(np.ones(L))
    return w / w.sum()


def random_grouped(rng, L, scale=EV, uniform=False):
    """L distinct energies (spacing >= 0.1 scale) with random weights."""
    gaps = scale * rng.uniform(0.1, 1.0, size=L - 1)
    energies = scale * rng.uniform(-5, 5) + np.concatenate(([0.0], np.cumsum(gaps)))
    return GroupedSpectrum(energies, random_weights(rng, L, uniform))


def rate_per_joule(geom, constants=CODATA):
    """Beat angular frequency per joule of energy difference."""
    return geom.g * geom.delta_x / (constants.hbar * constants.c**2)


@pytest.fixture
def lab_geometry():
    return SuperpositionGeometry(9.81, 1e-6)


@pytest.fixture
def two_level():
    return InternalSpectrum.from_levels([(0.0, 0.5), (EV, 0.5)])


ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    """Collect one summary line per acceptance criterion."""
    ACCEPTANCE_LINES.append((number, f"[{'PASS' if passed else 'FAIL'}] AC{number:<2} {detail}"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
