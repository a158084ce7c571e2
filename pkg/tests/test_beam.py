"""Cantilever beam oracles: mode roots, frequencies, statics, dynamics."""

import numpy as np
import pytest

from vbflow.beam import (
    BeamDivergence,
    BeamProperties,
    BeamSolver,
    BeamState,
    beam_energy,
    beam_static_deflection,
    beam_step,
    discrete_frequencies,
    explicit_dt_bound,
    fluid_frequency_ratio,
    kn_roots,
    tip_excitation,
    vacuum_frequency,
)

PROPS = BeamProperties()


def test_section_properties():
    assert PROPS.area == pytest.approx(5e-5)
    assert PROPS.inertia == pytest.approx(0.01 * 0.005**3 / 12.0, rel=1e-14)
    assert PROPS.flexural_rigidity == pytest.approx(6.770833333333333, rel=1e-12)
    assert PROPS.mass_per_length == pytest.approx(0.1335, rel=1e-14)


def test_kn_roots():
    k = kn_roots(3)
    # classical clamped-free roots
    assert k[0] == pytest.approx(1.8751040687, abs=1e-9)
    assert k[1] == pytest.approx(4.6940911330, abs=1e-9)
    assert k[2] == pytest.approx(7.8547574382, abs=1e-9)
    for kn in k:
        assert abs(1.0 + np.cos(kn) * np.cosh(kn)) <= 1e-9


def test_vacuum_frequencies():
    k = kn_roots(2)
    f = vacuum_frequency(PROPS, k)
    # independent recomputation from the closed form
    stiff = np.sqrt(PROPS.flexural_rigidity / PROPS.mass_per_length)
    f1 = 1.8751040687**2 / 0.15**2 * stiff / (2 * np.pi)
    assert f[0] == pytest.approx(f1, rel=1e-9)
    assert f[0] == pytest.approx(177.1205, abs=0.01)
    assert f[1] == pytest.approx(1109.9951, abs=0.05)


def test_fluid_frequency_ratio_values():
    r_water = fluid_frequency_ratio(PROPS, 1000.0)
    assert r_water == pytest.approx(0.79347257946, abs=1e-9)
    f = vacuum_frequency(PROPS, kn_roots(2)) * r_water
    assert f[0] == pytest.approx(140.54, abs=0.02)
    assert f[1] == pytest.approx(880.75, abs=0.05)
    # air barely shifts the spectrum
    assert fluid_frequency_ratio(PROPS, 1.204) == pytest.approx(1.0, abs=5e-4)


def test_fluid_ratio_monotone_in_density():
    rhos = np.linspace(0.0, 2000.0, 41)
    vals = np.array([fluid_frequency_ratio(PROPS, r) for r in rhos])
    assert vals[0] == 1.0
    assert np.all(np.diff(vals) < 0.0)


def test_static_tip_load_oracle():
    p_tip = 0.5
    exact = p_tip * PROPS.length**3 / (3.0 * PROPS.flexural_rigidity)
    r40 = beam_static_deflection(PROPS, 40, tip_force=p_tip)
    assert r40[-1] == pytest.approx(exact, rel=1e-3)
    # second-order convergence of the tip error
    e20 = abs(beam_static_deflection(PROPS, 20, tip_force=p_tip)[-1] - exact)
    e40 = abs(r40[-1] - exact)
    assert 3.0 <= e20 / e40 <= 5.0


def test_static_uniform_load_oracle():
    q = 2.0  # N/m
    n = 40
    load = np.full(n + 1, q)
    r = beam_static_deflection(PROPS, n, load=load)
    exact = q * PROPS.length**4 / (8.0 * PROPS.flexural_rigidity)
    assert r[-1] == pytest.approx(exact, rel=5e-3)


def test_discrete_spectrum_at_coupling_resolution():
    f = discrete_frequencies(PROPS, 10, 2)
    # the 10-cell operator sits a little below the continuum values
    assert f[0] == pytest.approx(175.64, abs=0.05)
    assert f[1] == pytest.approx(1064.6, abs=0.5)
    f160 = discrete_frequencies(PROPS, 160, 2)
    assert f160[0] == pytest.approx(177.1205, abs=0.05)
    assert f160[1] == pytest.approx(1109.995, abs=0.5)


def test_explicit_bound_and_enforcement():
    bound = explicit_dt_bound(PROPS, 10)
    assert bound == pytest.approx(1.5797e-5, rel=1e-3)
    with pytest.raises(ValueError):
        BeamSolver(PROPS, 10, dt=2e-5, theta=0.0)
    BeamSolver(PROPS, 10, dt=0.9 * bound, theta=0.0)  # fine


def test_free_vibration_frequency_matches_spectrum():
    # release from the static tip-load shape and count zero crossings
    n, dt = 10, 2e-5
    r0 = beam_static_deflection(PROPS, n, tip_force=0.01)
    state = BeamState(r0.copy(), r0.copy())
    solver = BeamSolver(PROPS, n, dt)
    tip = []
    for _ in range(20000):
        state = solver.step(state)
        tip.append(state.r[-1])
    tip = np.asarray(tip)
    t = dt * np.arange(1, tip.size + 1)
    sign = np.sign(tip)
    idx = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    crossings = t[idx] - tip[idx] * dt / (tip[idx + 1] - tip[idx])
    period = 2.0 * np.mean(np.diff(crossings))
    f_measured = 1.0 / period
    f_expected = discrete_frequencies(PROPS, n, 1)[0]
    assert f_measured == pytest.approx(f_expected, rel=2e-2)


def test_energy_bounded_under_centered_scheme():
    n, dt = 10, 2e-5
    state = BeamState.rest(n)
    solver = BeamSolver(PROPS, n, dt)
    for k in range(10):
        state = solver.step(state, tip_force=tip_excitation(k * dt, dt, 1e-3))
    e0 = beam_energy(PROPS, state, dt)
    energies = []
    for _ in range(10000):
        state = solver.step(state)
        energies.append(beam_energy(PROPS, state, dt))
    energies = np.asarray(energies)
    assert e0 > 0.0
    # the instantaneous sum oscillates within a period; what must not
    # happen is secular growth or decay of its running mean
    assert abs(energies[-500:].mean() - energies[:500].mean()) <= 0.01 * e0
    assert np.all(np.abs(energies - e0) <= 0.35 * e0)


def test_explicit_variant_stays_bounded_below_bound():
    n = 10
    dt = 0.9 * explicit_dt_bound(PROPS, n)
    solver = BeamSolver(PROPS, n, dt, theta=0.0)
    state = BeamState.rest(n)
    for k in range(2000):
        state = solver.step(state, tip_force=tip_excitation(k * dt, dt, 1e-3))
    assert np.isfinite(state.r).all()
    assert np.abs(state.r).max() < PROPS.length


def test_tip_excitation_window():
    dt = 2e-5
    samples = np.array([tip_excitation(k * dt, dt, 2.5) for k in range(12)])
    assert np.count_nonzero(samples[:10]) == 10
    assert samples[10] == 0.0 and samples[11] == 0.0
    assert abs(samples[:10].sum()) <= 1e-12
    assert np.abs(samples).max() <= 2.5


def test_divergence_guard():
    n, dt = 10, 2e-5
    solver = BeamSolver(PROPS, n, dt)
    state = BeamState.rest(n)
    with pytest.raises(BeamDivergence):
        for _ in range(50000):
            state = solver.step(state, tip_force=1e9)


def test_velocity_backward_difference():
    r = np.linspace(0, 1e-3, 11)
    rp = np.linspace(0, 0.5e-3, 11)
    st = BeamState(r, rp)
    assert np.allclose(st.velocity(0.1), (r - rp) / 0.1, atol=0.0)


def test_beam_step_wrapper_matches_solver():
    n, dt = 10, 2e-5
    r0 = beam_static_deflection(PROPS, n, tip_force=0.01)
    s1 = BeamState(r0.copy(), r0.copy())
    s2 = BeamState(r0.copy(), r0.copy())
    solver = BeamSolver(PROPS, n, dt)
    a = solver.step(s1)
    b = beam_step(PROPS, s2, dt)
    assert np.allclose(a.r, b.r, atol=0.0)


def test_clamped_end_stays_fixed():
    n, dt = 10, 2e-5
    solver = BeamSolver(PROPS, n, dt)
    state = BeamState.rest(n)
    for k in range(200):
        state = solver.step(state, tip_force=tip_excitation(k * dt, dt, 1e-2))
        assert state.r[0] == 0.0
