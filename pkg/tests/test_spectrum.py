import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from ppn_atom.geometry import PpnContext, UnitSystem
from ppn_atom.spectrum import (
    GridTooCoarseError,
    RadialProblem,
    darwin_cross_expectation,
    internal_levels,
    mass_defect,
    p4_expectation,
    proper_time_frequency,
    radial_states,
    solve_radial,
)

U = UnitSystem()
C = U.c
M1, M2 = 1.0, 1836.15267343


def ctx(eps=0.0, gamma=1.0, beta=1.0):
    return PpnContext(U, gamma=gamma, beta=beta, phi=eps * C**2)


def test_bohr_levels_unit_problem():
    E = solve_radial(RadialProblem(1.0, 1.0), 3)
    assert E[0] == pytest.approx(-0.5, rel=1e-6)
    assert E[1] == pytest.approx(-0.125, rel=1e-6)
    assert E[2] == pytest.approx(-1.0 / 18.0, rel=1e-6)


def test_p_states_start_at_n2():
    prob = RadialProblem(1.0, 1.0, l=1)
    E = solve_radial(prob, 2)
    assert np.allclose(E, [-0.125, -1.0 / 18.0], rtol=1e-6)
    assert np.allclose(prob.bohr_levels(2), [-0.125, -1.0 / 18.0])


@given(st.floats(0.98, 1.02), st.floats(0.98, 1.02))
def test_metric_coefficient_scaling(A, B):
    E = solve_radial(RadialProblem(0.7, 1.3, A, B), 2)
    base = solve_radial(RadialProblem(0.7, 1.3), 2)
    assert np.allclose(E, B**2 / A * base, rtol=1e-8)


def test_problem_validation():
    with pytest.raises(ValueError):
        RadialProblem(1.0, 1.0, N=100)
    with pytest.raises(ValueError):
        RadialProblem(1.0, -1.0)
    with pytest.raises(ValueError):
        RadialProblem(1.0, 1.0, r_max=5.0)
    with pytest.raises(ValueError):
        RadialProblem(1.0, 1.0, l=-1)
    with pytest.raises(GridTooCoarseError):
        solve_radial(RadialProblem(1.0, 1.0, N=2000), 1, tol=1e-12)


def test_p4_ground_state_independent_quadrature():
    prob = RadialProblem(1.0, 1.0)
    w, v, r, h = radial_states(prob, 2)
    # analytic 1s: u = 2 r exp(-r); <p^4> = 4 <(E + 1/r)^2>
    oracle, _ = quad(lambda x: 4.0 * (2 * x * math.exp(-x)) ** 2 * (-0.5 + 1 / x) ** 2, 0, 60, limit=200)
    assert oracle == pytest.approx(5.0, rel=1e-10)
    assert p4_expectation(v[:, 0], r, h, w[0], prob) == pytest.approx(oracle, rel=1e-4)
    assert p4_expectation(v[:, 1], r, h, w[1], prob) == pytest.approx(13.0 / 16.0, rel=1e-4)


def test_darwin_cross_ground_state():
    prob = RadialProblem(1.0, 1.0)
    _, v, r, h = radial_states(prob, 1)
    assert darwin_cross_expectation(v[:, 0], r, h, 0, 1.0) == pytest.approx(2.0, rel=1e-3)


def test_equal_mass_p4_shift():
    res = internal_levels(ctx(), 1.0, 1.0, 1.0, n_levels=1)
    mu = 0.5
    oracle = -(2.0 / 8.0) * 5.0 * mu**4 / (8 * mu**3 * C**2)
    assert res.delta_p4[0] == pytest.approx(oracle, rel=1e-4)


def test_heavy_partner_recovers_single_particle_p4():
    res = internal_levels(ctx(), 1.0, 1e12, 1.0, n_levels=1)
    assert res.delta_p4[0] == pytest.approx(-5.0 / (8 * C**2), rel=1e-4)


def test_levels_independent_of_gamma_at_first_order():
    eps = -1e-6
    ref = internal_levels(ctx(0.0), M1, M2, 1.0).energies
    for g in (0.0, 1.0, 2.0):
        E = internal_levels(ctx(eps, gamma=g), M1, M2, 1.0).energies
        assert np.all(np.abs(E - ref) <= 10 * (1 + g**2) * eps**2 * np.abs(ref) + 1e-12 * np.abs(ref))


def test_coordinate_levels_scale_exactly():
    eps, g = -1e-3, 1.5
    A, B = 1 + 2 * g * eps, 1 + g * eps
    E = internal_levels(ctx(eps, gamma=g), M1, M2, 1.0).energies
    E0 = internal_levels(ctx(0.0), M1, M2, 1.0).energies
    assert np.allclose(E, B**2 / A * E0, rtol=1e-9)


def test_mass_defect_properties():
    res = internal_levels(ctx(-1e-6), M1, M2, 1.0)
    M = M1 + M2
    assert all(mass_defect(res, n) < M for n in res.n)
    assert mass_defect(res, 2) - mass_defect(res, 1) == pytest.approx((res.totals[1] - res.totals[0]) / C**2, rel=1e-9)
    mu = M1 * M2 / M
    analytic = M - mu / (2 * C**2) + (res.delta_p4[0] + res.delta_cross[0]) / C**2
    assert mass_defect(res, 1) == pytest.approx(analytic, rel=1e-15)
    with pytest.raises(KeyError):
        mass_defect(res, 9)


def test_proper_frequency_ratio():
    base = internal_levels(ctx(0.0), M1, M2, 1.0)
    w0 = proper_time_frequency(base, 2, 1)
    assert w0 == pytest.approx(base.totals[1] - base.totals[0], rel=1e-15)
    bohr0 = base.energies[1] - base.energies[0]
    shift0 = w0 - bohr0
    for eps in (-1e-6, -1e-4, -1e-3):
        for g in (0.0, 1.0, 2.0):
            res = internal_levels(ctx(eps, gamma=g), M1, M2, 1.0)
            bohr = (res.energies[1] - res.energies[0]) / res.lapse
            assert abs(bohr / bohr0 - (1 - eps)) <= 10 * eps**2
            # the p^4 and Darwin shifts add O(eps v^2/c^2), i.e. c^-4 terms
            w = proper_time_frequency(res, 2, 1)
            bound = 10 * eps**2 + 10 * (1 + g) * abs(eps) * abs(shift0 / w0)
            assert abs(w / w0 - (1 - eps)) <= bound
    with pytest.raises(ValueError):
        proper_time_frequency(base, 1, 1)


def test_beta_only_second_order():
    eps = -1e-4
    a = proper_time_frequency(internal_levels(ctx(eps, beta=0.0), M1, M2, 1.0), 2, 1)
    b = proper_time_frequency(internal_levels(ctx(eps, beta=2.0), M1, M2, 1.0), 2, 1)
    assert abs(a - b) / abs(a) <= 10 * eps**2


def test_rows_and_runtime():
    t0 = time.perf_counter()
    res = internal_levels(ctx(-1e-6), M1, M2, 1.0, n_levels=1)
    assert time.perf_counter() - t0 < 10.0
    rows = res.rows()
    assert len(rows) == 1 and rows[0]["n"] == 1 and rows[0]["omega_proper"] == 0.0
    assert '"levels"' in res.to_json()
