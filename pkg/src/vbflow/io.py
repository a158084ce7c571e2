"""File emitters and readers: CSV series and legacy-text VTK snapshots.

CSV cells use shortest round-trip float formatting (repr), so re-parsing
an emitted file reproduces the stored values bitwise. VTK files use the
legacy ASCII rectilinear format, which every common viewer reads and
which diffs cleanly at desk scale.
"""

import csv
import os

import numpy as np

__all__ = [
    "write_csv",
    "read_csv",
    "append_csv_row",
    "write_vtk_rectilinear",
    "read_vtk_rectilinear",
    "SeriesWriter",
    "ensure_dir",
]


def _format(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    """Write a table; floats keep full round-trip precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_format(v) for v in row])


def read_csv(path):
    """Read back a numeric table as (header, array of float columns)."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r if row]
    return header, np.array(rows)


def append_csv_row(fh, row):
    csv.writer(fh).writerow([_format(v) for v in row])


class SeriesWriter:
    """Incremental CSV writer that keeps the file flushed per row."""

    def __init__(self, path, header):
        self.path = path
        self._fh = open(path, "w", newline="")
        csv.writer(self._fh).writerow(header)
        self._fh.flush()

    def write(self, row):
        append_csv_row(self._fh, row)
        self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_vtk_rectilinear(path, grid, cell_fields, title="flow snapshot"):
    """Legacy ASCII VTK rectilinear grid with cell data.

    ``cell_fields`` maps a name to an (nx, ny) scalar or (nx, ny, 2)
    vector array; vectors are padded with a zero z component.
    """
    nx, ny = grid.nx, grid.ny
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET RECTILINEAR_GRID",
        f"DIMENSIONS {nx + 1} {ny + 1} 1",
        f"X_COORDINATES {nx + 1} double",
        " ".join(repr(float(v)) for v in grid.xf),
        f"Y_COORDINATES {ny + 1} double",
        " ".join(repr(float(v)) for v in grid.yf),
        "Z_COORDINATES 1 double",
        "0.0",
        f"CELL_DATA {nx * ny}",
    ]
    for name, data in cell_fields.items():
        data = np.asarray(data)
        if data.ndim == 2:
            lines.append(f"SCALARS {name} double 1")
            lines.append("LOOKUP_TABLE default")
            # VTK expects x varying fastest: transpose the (nx, ny) layout
            lines.extend(" ".join(repr(float(v)) for v in col)
                         for col in data.T)
        elif data.ndim == 3 and data.shape[2] == 2:
            lines.append(f"VECTORS {name} double")
            for j in range(ny):
                row = []
                for i in range(nx):
                    row.append(f"{float(data[i, j, 0])!r} "
                               f"{float(data[i, j, 1])!r} 0.0")
                lines.append(" ".join(row))
        else:
            raise ValueError(f"field {name!r}: expected (nx, ny) or "
                             "(nx, ny, 2) data")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vtk_rectilinear(path):
    """Read back a snapshot written by :func:`write_vtk_rectilinear`.

    Returns (x_faces, y_faces, fields) with vector fields restored to
    (nx, ny, 2) arrays.
    """
    with open(path) as fh:
        tokens = fh.read().split("\n")
    it = iter(tokens)
    xf = yf = None
    fields = {}
    nx = ny = None
    line = next(it, None)
    while line is not None:
        parts = line.split()
        if parts[:1] == ["X_COORDINATES"]:
            xf = np.array([float(v) for v in next(it).split()])
            nx = xf.size - 1
        elif parts[:1] == ["Y_COORDINATES"]:
            yf = np.array([float(v) for v in next(it).split()])
            ny = yf.size - 1
        elif parts[:1] == ["SCALARS"]:
            name = parts[1]
            next(it)                                   # LOOKUP_TABLE line
            vals = []
            while len(vals) < nx * ny:
                vals.extend(float(v) for v in next(it).split())
            fields[name] = np.array(vals).reshape(ny, nx).T
        elif parts[:1] == ["VECTORS"]:
            name = parts[1]
            vals = []
            while len(vals) < 3 * nx * ny:
                vals.extend(float(v) for v in next(it).split())
            arr = np.array(vals).reshape(ny, nx, 3)
            fields[name] = np.moveaxis(arr[:, :, :2], 0, 1)
        line = next(it, None)
    return xf, yf, fields


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
