"""Figure rendering for run and benchmark outputs.

Every function saves a PNG next to the delimited data it came from and
returns the path. Rendering is headless (Agg); nothing here opens a
window.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_csv

__all__ = [
    "plot_force_history",
    "plot_slip_error",
    "plot_spectrum",
    "plot_beam_history",
    "plot_stability_map",
    "plot_vorticity",
    "render_series_report",
    "render_fsi_report",
    "render_stability_report",
]

_DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_force_history(t, cd, cl, path, title="force coefficients"):
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    ax.plot(t, cd, label="drag")
    ax.plot(t, cl, label="lift")
    ax.set_xlabel("t")
    ax.set_ylabel("coefficient")
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_slip_error(t, ex, path):
    fig, ax = plt.subplots(figsize=(7.0, 3.0))
    ax.semilogy(t, np.maximum(ex, 1e-300))
    ax.set_xlabel("t")
    ax.set_ylabel("boundary slip error")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_spectrum(t, x, path, band=None, title="amplitude spectrum"):
    """Hann-windowed magnitude spectrum of a detrended series."""
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    dt = t[1] - t[0]
    win = np.hanning(x.size)
    mag = np.abs(np.fft.rfft(x * win))
    f = np.fft.rfftfreq(x.size, dt)
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    ax.semilogy(f[1:], np.maximum(mag[1:], 1e-300))
    if band is not None:
        ax.axvspan(band[0], band[1], color="tab:orange", alpha=0.15)
        ax.set_xlim(0.0, 2.0 * band[1])
    ax.set_xlabel("frequency")
    ax.set_ylabel("magnitude")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_beam_history(t, tip, avg, path, title="cantilever ring-down"):
    fig, axes = plt.subplots(2, 1, figsize=(7.0, 5.0), sharex=True)
    axes[0].plot(t, tip)
    axes[0].set_ylabel("tip deflection")
    axes[1].plot(t, avg)
    axes[1].set_ylabel("mean deflection")
    axes[1].set_xlabel("t")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    axes[0].set_title(title)
    return _save(fig, path)


def plot_stability_map(probes, path, scheme="bdf1", gamma=0.0):
    """Probe outcomes over the analytic gain stability boundary.

    ``probes`` is a list of dicts with alpha_x, beta_y, scheme, gamma,
    stable; only rows matching (scheme, gamma) are drawn.
    """
    from .stability import boundary_polyline

    rows = [p for p in probes
            if p["scheme"] == scheme and p["gamma"] == gamma]
    y_top = max([p["beta_y"] for p in rows], default=4.0) + 1.0
    ys = np.linspace(0.0, max(y_top, 4.0), 41)
    xs = boundary_polyline(scheme, gamma, ys)
    fig, ax = plt.subplots(figsize=(5.5, 5.0))
    ax.plot(xs, ys, "k-", label="stability boundary")
    for stable, marker, color in ((True, "o", "tab:green"),
                                  (False, "x", "tab:red")):
        pts = [(p["alpha_x"], p["beta_y"]) for p in rows
               if p["stable"] == stable]
        if pts:
            arr = np.array(pts)
            ax.plot(arr[:, 0], arr[:, 1], marker, color=color, ls="none",
                    label="stable" if stable else "unstable")
    ax.set_xlabel(r"$-\alpha\,\Delta t^2$")
    ax.set_ylabel(r"$-\beta\,\Delta t$")
    ax.set_title(f"{scheme}, gamma = {gamma:g}")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_vorticity(grid, u, path, body=None, levels=31, clip=None):
    """Filled vorticity contours of a cell-centered velocity field."""
    x, y = np.meshgrid(grid.xc, grid.yc, indexing="ij")
    dudy = np.gradient(u[:, :, 0], grid.yc, axis=1)
    dvdx = np.gradient(u[:, :, 1], grid.xc, axis=0)
    w = dvdx - dudy
    if clip is None:
        clip = np.percentile(np.abs(w), 99.5)
    clip = max(clip, 1e-12)
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    m = ax.contourf(x, y, np.clip(w, -clip, clip),
                    levels=np.linspace(-clip, clip, levels), cmap="RdBu_r")
    fig.colorbar(m, ax=ax, label="vorticity")
    if body is not None:
        pts = np.asarray(body)
        ax.plot(np.append(pts[:, 0], pts[0, 0]),
                np.append(pts[:, 1], pts[0, 1]), "k-", lw=1.0)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return _save(fig, path)


def render_series_report(case_dir, band=None):
    """PNGs for one flow case directory holding a series.csv."""
    path = os.path.join(case_dir, "series.csv")
    header, data = read_csv(path)
    col = {name: data[:, k] for k, name in enumerate(header)}
    made = [plot_force_history(col["t"], col["cd"], col["cl"],
                               os.path.join(case_dir, "forces.png")),
            plot_slip_error(col["t"], col["ex"],
                            os.path.join(case_dir, "slip_error.png"))]
    if col["t"].size >= 64:
        made.append(plot_spectrum(col["t"], col["cl"],
                                  os.path.join(case_dir, "lift_spectrum.png"),
                                  band=band, title="lift spectrum"))
    return made


def render_fsi_report(case_dir, band=None):
    """PNGs for the cantilever immersion runs (air/water csv triples)."""
    made = []
    for fname in sorted(os.listdir(case_dir)):
        if not fname.endswith(".csv"):
            continue
        tag = fname[:-4]
        header, data = read_csv(os.path.join(case_dir, fname))
        col = {name: data[:, k] for k, name in enumerate(header)}
        made.append(plot_beam_history(
            col["t"], col["tip"], col["avg"],
            os.path.join(case_dir, f"{tag}_history.png"),
            title=f"cantilever ring-down ({tag})"))
        made.append(plot_spectrum(
            col["t"], col["avg"],
            os.path.join(case_dir, f"{tag}_spectrum.png"),
            band=band, title=f"deflection spectrum ({tag})"))
    return made


def render_stability_report(probes, case_dir):
    made = [plot_stability_map(
        probes, os.path.join(case_dir, "map_bdf1.png"), "bdf1", 0.0)]
    if any(p["scheme"] == "bdf2" for p in probes):
        made.append(plot_stability_map(
            probes, os.path.join(case_dir, "map_bdf2.png"), "bdf2", -2.0))
    return made
