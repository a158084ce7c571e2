"""Force-coefficient and spectral estimator oracles."""

import numpy as np
import pytest

from vbflow.diagnostics import (
    aero_coefficients,
    dominant_frequencies,
    lift_fluctuation,
    peak_frequency,
    slip_error,
    strouhal,
    trim_series,
)


def test_aero_coefficients_synthetic_force():
    # forcing that integrates to exactly (-0.5, +0.2) per unit mass
    vols = np.full((10, 10), 0.01)
    f = np.zeros((10, 10, 2))
    f[..., 0] = -0.5 / vols.sum()
    f[..., 1] = 0.2 / vols.sum()
    cd, cl = aero_coefficients(f, vols, u_ref=1.0, l_ref=1.0)
    assert cd == pytest.approx(1.0, rel=1e-12)
    assert cl == pytest.approx(-0.4, rel=1e-12)
    # quadratic velocity normalization
    cd2, _ = aero_coefficients(f, vols, u_ref=2.0, l_ref=1.0)
    assert cd2 == pytest.approx(0.25, rel=1e-12)


def test_slip_error_frozen():
    u_ib = np.array([[0.3, 9.0], [-0.4, -9.0]])
    u_b = np.zeros((2, 2))
    assert slip_error(u_ib, u_b) == pytest.approx(np.sqrt(0.125), rel=1e-12)
    assert slip_error(u_ib, u_b, component=1) == pytest.approx(9.0, rel=1e-12)
    assert slip_error(np.array([0.3, -0.4]), np.zeros(2)) == pytest.approx(
        0.35355339059327373, rel=1e-12)


def test_trim_series_drops_leading_half():
    t = np.linspace(0, 10, 101)
    x = np.arange(101.0)
    tt, xx = trim_series(t, x, 0.5)
    assert tt.size == 51
    assert tt[0] == pytest.approx(5.0)
    assert xx[0] == 50.0


def test_lift_fluctuation_sine_amplitude():
    t = np.linspace(0, 20, 4001)
    lift = 0.1 + 0.33 * np.sin(2 * np.pi * 0.8 * t)
    assert lift_fluctuation(lift) == pytest.approx(0.33, rel=1e-3)


def test_peak_frequency_pure_tone():
    dt = 0.01
    t = dt * np.arange(4096)
    x = 1.7 + np.sin(2 * np.pi * 3.37 * t + 0.4)
    assert peak_frequency(t, x) == pytest.approx(3.37, abs=0.01)


def test_peak_frequency_rejects_nonuniform():
    t = np.concatenate([np.linspace(0, 1, 50), np.linspace(1.1, 2, 50)])
    with pytest.raises(ValueError):
        peak_frequency(t, np.sin(t))


def test_strouhal_scaling():
    dt = 0.05
    t = dt * np.arange(4096)
    lift = np.sin(2 * np.pi * 0.16 * t)
    st = strouhal(t, lift, u_ref=1.0, l_ref=1.0)
    assert st == pytest.approx(0.16, abs=0.002)
    assert strouhal(t, lift, u_ref=2.0, l_ref=1.0) == pytest.approx(0.08, abs=0.001)


def test_dominant_frequencies_two_tones():
    dt = 0.01
    t = dt * np.arange(8192)
    x = np.sin(2 * np.pi * 3.3 * t) + 0.6 * np.sin(2 * np.pi * 4.1 * t + 1.0)
    f = dominant_frequencies(t, x, n_peaks=2)
    assert f[0] == pytest.approx(3.3, abs=0.02)
    assert f[1] == pytest.approx(4.1, abs=0.02)


def test_dominant_frequencies_needs_samples():
    t = np.linspace(0, 1, 1000)
    with pytest.raises(ValueError):
        dominant_frequencies(t, np.sin(t), 1)


def test_dominant_frequencies_single_tone_refuses_two_peaks():
    dt = 0.01
    t = dt * np.arange(4096)
    x = np.sin(2 * np.pi * 2.0 * t)
    with pytest.raises(ValueError):
        dominant_frequencies(t, x, n_peaks=2)
