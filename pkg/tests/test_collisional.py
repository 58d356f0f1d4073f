import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravdephase import collisional as cl
from gravdephase.collisional import CollisionalBath
from gravdephase.dephasing import DivergentTimescale, SuperpositionGeometry, n_subsystem_dephasing_time
from gravdephase.units import (
    CODATA,
    PAPER,
    ev_to_joule,
    mass_ev_per_c2_to_kg,
    per_m3_to_per_cm3,
    temperature_from_energy,
)

ROOM_T = temperature_from_energy(ev_to_joule(1 / 39))
N2_MASS = mass_ev_per_c2_to_kg(14e9)


@pytest.fixture
def bath():
    return CollisionalBath(2.5e25, 1e-18, N2_MASS, ROOM_T)


def test_bath_validation():
    with pytest.raises(ValueError):
        CollisionalBath(0.0, 1e-18, N2_MASS, ROOM_T)
    with pytest.raises(ValueError):
        CollisionalBath(1.0, 1e-18, N2_MASS, -1.0)


class TestQ2V:
    def test_scaling(self):
        base = cl.q2v_thermal(N2_MASS, ROOM_T)
        assert cl.q2v_thermal(N2_MASS, 4 * ROOM_T) == pytest.approx(8 * base, rel=1e-14)
        assert cl.q2v_thermal(4 * N2_MASS, ROOM_T) == pytest.approx(2 * base, rel=1e-14)

    def test_value(self):
        # mpmath: 4 sqrt(m/pi) (2 kT)^1.5 at m = 14e9 eV/c^2, kT = 1/39 eV
        assert cl.q2v_thermal(N2_MASS, ROOM_T) == pytest.approx(2.655200005610864926e-43, rel=1e-13)

    def test_rejects(self):
        with pytest.raises(ValueError):
            cl.q2v_thermal(0.0, ROOM_T)
        with pytest.raises(ValueError):
            cl.q2v_thermal(N2_MASS, 0.0)


class TestRates:
    def test_lambda_linear(self, bath):
        lam = cl.lambda_rate(bath)
        assert cl.lambda_rate(bath.with_density(2 * bath.n)) == pytest.approx(2 * lam, rel=1e-15)
        doubled_sigma = CollisionalBath(bath.n, 2 * bath.sigma, bath.m_scatterer, bath.T)
        assert cl.lambda_rate(doubled_sigma) == pytest.approx(2 * lam, rel=1e-15)
        expected = bath.n * bath.sigma * cl.q2v_thermal(bath.m_scatterer, bath.T) / (3 * CODATA.hbar**2)
        assert lam == pytest.approx(expected, rel=1e-15)

    def test_small_density_diverges(self, bath):
        tiny = bath.with_density(1e-100)
        assert cl.collisional_time(tiny, 1e-9) == pytest.approx(cl.collisional_time(bath, 1e-9) * 2.5e125, rel=1e-12)
        # the rate underflows to zero: divergent timescale
        with pytest.raises(DivergentTimescale):
            cl.collisional_time(bath.with_density(1e-300), 1e-9)
        with pytest.raises(DivergentTimescale):
            cl.collisional_time_from_rate(0.0, 1e-9)

    def test_time_scaling(self, bath):
        t = cl.collisional_time(bath, 2e-9)
        assert cl.collisional_time(bath, 1e-9) == pytest.approx(4 * t, rel=1e-15)
        assert cl.collisional_time(bath, -2e-9) == t
        with pytest.raises(ValueError):
            cl.collisional_time(bath, 0.0)


class TestCollisionalVisibility:
    def test_examples(self):
        assert cl.collisional_visibility(0.0, 3.0) == 1.0
        assert cl.collisional_visibility(3.0, 3.0) == pytest.approx(math.exp(-1), rel=1e-15)
        assert cl.collisional_visibility(30.0, 3.0) == pytest.approx(4.539992976248485e-05, rel=1e-14)

    def test_strictly_decreasing(self):
        v = cl.collisional_visibility(np.linspace(0, 50, 200), 2.0)
        assert np.all(np.diff(v) < 0) and v[-1] < 1e-10

    def test_rejects(self):
        with pytest.raises(ValueError):
            cl.collisional_visibility(1.0, 0.0)
        with pytest.raises(ValueError):
            cl.collisional_visibility(-1.0, 1.0)


class TestCrossover:
    geom = SuperpositionGeometry(9.81, 1e-9)

    def test_sqrt_n(self):
        n1 = cl.crossover_density(1000, self.geom, 1e-18, N2_MASS, ROOM_T)
        assert cl.crossover_density(4000, self.geom, 1e-18, N2_MASS, ROOM_T) == pytest.approx(2 * n1, rel=1e-14)

    def test_paper_value(self):
        m = mass_ev_per_c2_to_kg(14e9, PAPER)
        geom = SuperpositionGeometry(9.81, 1e-9)
        n = cl.crossover_density(1000, geom, 1e-18, m, ROOM_T, PAPER)
        assert per_m3_to_per_cm3(n) == pytest.approx(1.2e-5, rel=0.01)

    def test_cgs_evaluation_agrees(self):
        # the same closed form in eV / cm / s with m in eV/c^2 gives the same density
        hbar_ev, c_cm, g_cm, dx_cm, sigma_cm2, kT_ev, m_ev = 6.6e-16, 3e10, 981.0, 1e-7, 1e-14, 1 / 39, 14e9
        n_cgs = 3 * math.sqrt(1000 * math.pi) / 16 * hbar_ev * g_cm / (
            c_cm**2 * dx_cm * sigma_cm2 * math.sqrt(m_ev / c_cm**2 * kT_ev)
        )
        m = mass_ev_per_c2_to_kg(14e9, PAPER)
        n_si = cl.crossover_density(1000, self.geom, 1e-18, m, ROOM_T, PAPER)
        assert per_m3_to_per_cm3(n_si) == pytest.approx(n_cgs, rel=1e-10)
        bath_n = 3.3e-6
        assert (bath_n / n_cgs) == pytest.approx(bath_n / per_m3_to_per_cm3(n_si), rel=1e-10)

    def test_identity(self):
        n = cl.crossover_density(1000, self.geom, 1e-18, N2_MASS, ROOM_T)
        bath = CollisionalBath(n, 1e-18, N2_MASS, ROOM_T)
        t_coll = cl.collisional_time(bath, self.geom.delta_x)
        t_nd = n_subsystem_dephasing_time(CODATA.k_B * ROOM_T, 1000, self.geom)
        assert t_coll == pytest.approx(t_nd, rel=1e-10)

    def test_rejects(self):
        with pytest.raises(ValueError):
            cl.crossover_density(0, self.geom, 1e-18, N2_MASS, ROOM_T)
        with pytest.raises(ValueError):
            cl.crossover_density(10, SuperpositionGeometry(9.81, 0.0), 1e-18, N2_MASS, ROOM_T)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1, 1e6), st.floats(1e-10, 1e-4), st.floats(1e-20, 1e-16), st.floats(1, 1e3),
           st.floats(1e-27, 1e-24), st.floats(1.1, 3.0))
    def test_monotone(self, N, dx, sigma, T, m, f):
        geom = SuperpositionGeometry(9.81, dx)
        n = cl.crossover_density(N, geom, sigma, m, T)
        assert cl.crossover_density(f * N, geom, sigma, m, T) > n
        assert cl.crossover_density(N, SuperpositionGeometry(f * 9.81, dx), sigma, m, T) > n
        assert cl.crossover_density(N, geom, f * sigma, m, T) < n
        assert cl.crossover_density(N, SuperpositionGeometry(9.81, f * dx), sigma, m, T) < n
        assert cl.crossover_density(N, geom, sigma, f * m, T) < n
        assert cl.crossover_density(N, geom, sigma, m, f * T) < n
        bath = CollisionalBath(1e20, sigma, m, T)
        t = cl.collisional_time(bath, dx)
        assert cl.collisional_time(bath.with_density(f * 1e20), dx) < t
        assert cl.collisional_time(CollisionalBath(1e20, f * sigma, m, T), dx) < t
        assert cl.collisional_time(CollisionalBath(1e20, sigma, m, f * T), dx) < t
        assert cl.collisional_time(bath, f * dx) < t


class TestCompare:
    geom = SuperpositionGeometry(9.81, 1e-9)

    def test_atmosphere_collisions_win(self, bath):
        rep = cl.compare_timescales(1000, self.geom, bath, equilibrium=True)
        assert not rep.gravitational_dominates
        assert rep.t_coll < rep.t_ND

    def test_below_crossover(self, bath):
        n = cl.compare_timescales(1000, self.geom, bath, equilibrium=True).n_crossover
        rep = cl.compare_timescales(1000, self.geom, bath.with_density(n / 2), equilibrium=True)
        assert rep.gravitational_dominates
        assert rep.t_ND < rep.t_coll

    def test_at_crossover(self, bath):
        n = cl.compare_timescales(1000, self.geom, bath, equilibrium=True).n_crossover
        rep = cl.compare_timescales(1000, self.geom, bath.with_density(n), equilibrium=True)
        assert rep.t_ND == pytest.approx(rep.t_coll, rel=1e-10)
        assert rep.gravitational_dominates is False

    def test_report_invariants(self, bath):
        rep = cl.compare_timescales(1000, self.geom, bath, delta_E_single=3e-21)
        at = cl.collisional_time(bath.with_density(rep.n_crossover), self.geom.delta_x)
        assert at == pytest.approx(rep.t_ND, rel=1e-10)
        assert rep.gravitational_dominates == (rep.t_ND < rep.t_coll)
        assert rep.n_crossover_per_cm3 == pytest.approx(rep.n_crossover * 1e-6)

    def test_equilibrium_matches_explicit(self, bath):
        eq = cl.compare_timescales(1000, self.geom, bath, equilibrium=True)
        explicit = cl.compare_timescales(1000, self.geom, bath, delta_E_single=CODATA.k_B * bath.T)
        assert eq.n_crossover == pytest.approx(explicit.n_crossover, rel=1e-12)

    def test_needs_spread(self, bath):
        with pytest.raises(ValueError):
            cl.compare_timescales(1000, self.geom, bath)
