"""Signal and force diagnostics for immersed-body runs.

Force coefficients come from the volume integral of the feedback forcing:
the force the body exerts on the fluid is the integral of the forcing
density, so the aerodynamic force on the body is its negative. With the
forcing expressed per unit mass the fluid density cancels from the
conventional coefficient normalization:

    C_d = -2 sum_ij f_x Omega_ij / (L_ref U_ref^2)

and likewise for lift. For closed bodies the runner additionally
subtracts the momentum rate of the enclosed fluid (see
``masked_momentum``), without which an oscillating cylinder reports its
interior inertia as extra drag.
"""

import numpy as np

__all__ = [
    "aero_coefficients",
    "masked_momentum",
    "slip_error",
    "trim_series",
    "lift_fluctuation",
    "dominant_frequencies",
    "strouhal",
    "peak_frequency",
]


def aero_coefficients(forcing, volumes, u_ref, l_ref):
    """Drag and lift coefficients from a per-unit-mass forcing field.

    ``forcing`` has shape (nx, ny, 2); ``volumes`` (nx, ny).
    """
    fx = np.sum(forcing[..., 0] * volumes)
    fy = np.sum(forcing[..., 1] * volumes)
    scale = -2.0 / (l_ref * u_ref**2)
    return scale * fx, scale * fy


def masked_momentum(u, volumes, mask):
    """Volume-integrated momentum (per unit density) over masked cells.

    Used for the interior of a closed surface-forced body: the markers
    drag the enclosed fluid along, so the raw forcing integral contains
    the inertia of that fluid on top of the hydrodynamic force. The
    reported coefficients subtract its rate of change.
    """
    w = volumes * mask
    return np.array([np.sum(u[..., 0] * w), np.sum(u[..., 1] * w)])


def slip_error(u_ib, u_b, component=0):
    """RMS of one slip component over the markers."""
    slip = np.asarray(u_ib, dtype=float) - np.asarray(u_b, dtype=float)
    if slip.ndim == 2:
        slip = slip[:, component]
    return float(np.sqrt(np.mean(slip**2)))


def trim_series(t, x, fraction=0.5):
    """Drop the leading ``fraction`` of a time series (transient removal)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n0 = int(np.floor(fraction * t.size))
    return t[n0:], x[n0:]


def lift_fluctuation(lift):
    """Half the peak-to-peak excursion of a (pre-trimmed) lift series."""
    lift = np.asarray(lift, dtype=float)
    return 0.5 * (lift.max() - lift.min())


def peak_frequency(t, x):
    """Dominant frequency of a uniformly sampled series.

    Hann window, mean removal, rFFT, then quadratic interpolation of the
    log magnitude around the largest interior bin for sub-bin resolution.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size < 16:
        raise ValueError("series too short for a frequency estimate")
    dt = np.diff(t)
    if np.any(np.abs(dt - dt[0]) > 1e-8 * abs(dt[0])):
        raise ValueError("series must be uniformly sampled")
    n = x.size
    window = np.hanning(n)
    spec = np.abs(np.fft.rfft((x - x.mean()) * window))
    freqs = np.fft.rfftfreq(n, d=dt[0])
    k = int(np.argmax(spec[1:]) + 1)  # skip the DC bin
    if 1 <= k < spec.size - 1 and spec[k - 1] > 0 and spec[k + 1] > 0:
        la, lb, lc = np.log(spec[k - 1]), np.log(spec[k]), np.log(spec[k + 1])
        denom = la - 2.0 * lb + lc
        shift = 0.0 if denom == 0 else 0.5 * (la - lc) / denom
        shift = np.clip(shift, -0.5, 0.5)
    else:
        shift = 0.0
    return float((k + shift) * (freqs[1] - freqs[0]))


def strouhal(t, lift, u_ref, l_ref):
    """Strouhal number from the dominant lift frequency."""
    return peak_frequency(t, lift) * l_ref / u_ref


def dominant_frequencies(t, x, n_peaks=2, min_separation=None, rel_floor=0.05,
                         band=None):
    """The ``n_peaks`` strongest well-separated spectral peaks, ascending.

    Requires at least 2048 samples. Peaks are local maxima of the windowed
    magnitude spectrum, refined by quadratic interpolation; candidates
    closer than ``min_separation`` (default 2 bins) to a stronger peak or
    weaker than ``rel_floor`` times the strongest line (window sidelobe
    rejection) are suppressed. ``band = (f_lo, f_hi)`` restricts the search
    to that frequency range, for picking out known modes of a broadband
    ring-down.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.size < 2048:
        raise ValueError("need at least 2048 samples")
    dt = t[1] - t[0]
    n = x.size
    window = np.hanning(n)
    spec = np.abs(np.fft.rfft((x - x.mean()) * window))
    df = 1.0 / (n * dt)
    if min_separation is None:
        min_separation = 2.0 * df

    interior = np.arange(1, spec.size - 1)
    is_max = (spec[interior] > spec[interior - 1]) & (spec[interior] >= spec[interior + 1])
    cand = interior[is_max]
    if band is not None:
        f_lo, f_hi = band
        cand = cand[(cand * df >= f_lo) & (cand * df <= f_hi)]
    if cand.size == 0:
        raise ValueError("no spectral peaks in the requested band")
    cand = cand[spec[cand] >= rel_floor * spec[cand].max()]
    cand = cand[np.argsort(spec[cand])[::-1]]

    chosen = []
    for k in cand:
        la, lb, lc = np.log(spec[k - 1] + 1e-300), np.log(spec[k] + 1e-300), \
            np.log(spec[k + 1] + 1e-300)
        denom = la - 2.0 * lb + lc
        shift = 0.0 if denom == 0 else np.clip(0.5 * (la - lc) / denom, -0.5, 0.5)
        f = (k + shift) * df
        if all(abs(f - fc) >= min_separation for fc in chosen):
            chosen.append(f)
        if len(chosen) == n_peaks:
            break
    if len(chosen) < n_peaks:
        raise ValueError(
            f"found only {len(chosen)} separated peaks, wanted {n_peaks}"
        )
    return np.array(sorted(chosen))
