"""File formats: CSV precision round-trips and VTK snapshots."""

import numpy as np

from vbflow.io import (
    SeriesWriter,
    read_csv,
    read_vtk_rectilinear,
    write_csv,
    write_vtk_rectilinear,
)
from vbflow.mesh import build_uniform_grid


def test_csv_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(7)
    rows = rng.standard_normal((40, 3)) * np.array([1e-12, 1.0, 1e9])
    rows[3, 1] = np.pi
    rows[5, 2] = 1.0 / 3.0
    path = tmp_path / "table.csv"
    write_csv(path, ("a", "b", "c"), rows)
    header, back = read_csv(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(back, rows)  # exact, not approximate


def test_series_writer_flushes_every_row(tmp_path):
    path = tmp_path / "series.csv"
    with SeriesWriter(path, ("t", "v")) as w:
        w.write((0.1, 1.0))
        # a concurrent reader sees completed rows mid-run
        header, data = read_csv(path)
        assert header == ["t", "v"] and data.shape == (1, 2)
        w.write((0.2, 2.0))
    header, data = read_csv(path)
    assert data.shape == (2, 2)
    assert np.array_equal(data[:, 0], [0.1, 0.2])


def test_vtk_round_trip(tmp_path):
    grid = build_uniform_grid((0.0, 1.0, 0.0, 0.5), h=0.125)
    rng = np.random.default_rng(3)
    p = rng.standard_normal((grid.nx, grid.ny))
    u = rng.standard_normal((grid.nx, grid.ny, 2))
    path = tmp_path / "snap.vtk"
    write_vtk_rectilinear(path, grid, {"pressure": p, "velocity": u})
    xf, yf, fields = read_vtk_rectilinear(path)
    assert np.array_equal(xf, grid.xf)
    assert np.array_equal(yf, grid.yf)
    assert np.array_equal(fields["pressure"], p)
    assert np.array_equal(fields["velocity"], u)


def test_vtk_header_is_legacy_ascii(tmp_path):
    grid = build_uniform_grid((0.0, 1.0, 0.0, 1.0), h=0.5)
    path = tmp_path / "s.vtk"
    write_vtk_rectilinear(path, grid, {"p": np.zeros((grid.nx, grid.ny))})
    head = path.read_text().splitlines()[:4]
    assert head[0].startswith("# vtk DataFile")
    assert head[2] == "ASCII"
    assert head[3] == "DATASET RECTILINEAR_GRID"
