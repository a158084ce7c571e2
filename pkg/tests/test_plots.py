"""Figure rendering smoke checks (headless, file outputs only)."""

import numpy as np

from vbflow import plots
from vbflow.io import write_csv
from vbflow.mesh import build_uniform_grid


def test_series_report_renders(tmp_path):
    t = np.linspace(0.0, 50.0, 4096)
    cd = 1.3 + 0.05 * np.sin(2.0 * np.pi * 0.32 * t)
    cl = 0.3 * np.sin(2.0 * np.pi * 0.16 * t)
    ex = np.exp(-t) + 1e-6
    rows = np.column_stack([t, cd, cl, ex, 0.2 * np.ones_like(t),
                            1e-9 * np.ones_like(t)])
    write_csv(tmp_path / "series.csv",
              ("t", "cd", "cl", "ex", "cfl", "divergence"), rows)
    made = plots.render_series_report(str(tmp_path), band=(0.1, 0.25))
    assert len(made) == 3
    for path in made:
        assert (tmp_path / path.split("/")[-1]).stat().st_size > 2000


def test_fsi_report_renders(tmp_path):
    t = np.arange(4096) * 2e-5
    tip = 1e-6 * np.sin(2.0 * np.pi * 170.0 * t) * np.exp(-5.0 * t)
    avg = 0.4 * tip
    write_csv(tmp_path / "air.csv", ("t", "tip", "avg"),
              np.column_stack([t, tip, avg]))
    made = plots.render_fsi_report(str(tmp_path), band=(40.0, 1300.0))
    assert len(made) == 2


def test_stability_map_renders(tmp_path):
    probes = [
        {"alpha_x": 4.0, "beta_y": 1.0, "scheme": "bdf1", "gamma": 0.0,
         "dt": 0.0075, "stable": True},
        {"alpha_x": 12.0, "beta_y": 0.0, "scheme": "bdf1", "gamma": 0.0,
         "dt": 0.0075, "stable": False},
    ]
    made = plots.render_stability_report(probes, str(tmp_path))
    assert len(made) == 1
    assert made[0].endswith("map_bdf1.png")


def test_vorticity_figure(tmp_path):
    grid = build_uniform_grid((0.0, 1.0, 0.0, 1.0), h=0.05)
    x, y = np.meshgrid(grid.xc, grid.yc, indexing="ij")
    u = np.zeros((grid.nx, grid.ny, 2))
    u[..., 0] = np.sin(np.pi * x) * np.cos(np.pi * y)
    u[..., 1] = -np.cos(np.pi * x) * np.sin(np.pi * y)
    theta = np.linspace(0.0, 2.0 * np.pi, 33)
    body = np.column_stack([0.5 + 0.1 * np.cos(theta),
                            0.5 + 0.1 * np.sin(theta)])
    out = plots.plot_vorticity(grid, u, str(tmp_path / "w.png"), body=body)
    assert (tmp_path / "w.png").stat().st_size > 2000
    assert out.endswith("w.png")
