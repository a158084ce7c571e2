"""Finite-volume geometry, boundary conditions and face operators.

Cell-centered collocated layout on a Cartesian tensor-product grid. Fluxes
live on faces: ``phi_x`` has shape (nx+1, ny) and is positive in +x,
``phi_y`` has shape (nx, ny+1) and is positive in +y. Unit depth is
assumed, so an x-face area is the cell height dy and a cell volume is
dx * dy.

Face interpolation is linear with opposite-distance weights, which makes
it exact for fields varying linearly in the face-normal coordinate, also
on stretched grids.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SIDES = ("west", "east", "south", "north")
VELOCITY_KINDS = ("dirichlet", "no-slip", "zero-gradient", "outflow", "profile")
PRESSURE_KINDS = ("zero-gradient", "fixed")

__all__ = [
    "SIDES",
    "VELOCITY_KINDS",
    "PRESSURE_KINDS",
    "SideBC",
    "Boundaries",
    "FaceGeometry",
    "side_face_centers",
    "side_face_areas",
    "boundary_velocity_values",
    "interpolate_to_faces",
    "pressure_face_values",
    "pressure_gradient",
    "flux_divergence",
    "muscl_face_values",
    "upwind_face_values",
]


@dataclass
class SideBC:
    """Boundary condition of one domain side.

    ``velocity`` is one of VELOCITY_KINDS; ``value`` feeds "dirichlet",
    ``profile`` is a callable (t, s) -> (n, 2) of the face-tangential
    coordinate for "profile". ``pressure`` is "zero-gradient" or "fixed"
    (with ``p_value``); fixing the pressure requires the side's velocity
    to be unconstrained ("zero-gradient").
    """

    velocity: str = "no-slip"
    value: tuple = (0.0, 0.0)
    profile: Callable | None = None
    pressure: str = "zero-gradient"
    p_value: float = 0.0

    def __post_init__(self):
        if self.velocity not in VELOCITY_KINDS:
            raise ValueError(f"unknown velocity condition {self.velocity!r}")
        if self.pressure not in PRESSURE_KINDS:
            raise ValueError(f"unknown pressure condition {self.pressure!r}")
        if self.velocity == "profile" and self.profile is None:
            raise ValueError("profile condition needs a profile callable")
        if self.pressure == "fixed" and self.velocity not in ("zero-gradient",):
            raise ValueError(
                "fixed pressure requires zero-gradient velocity on the side")

    @property
    def prescribes_velocity(self):
        return self.velocity in ("dirichlet", "no-slip", "profile", "outflow")


@dataclass
class Boundaries:
    west: SideBC = field(default_factory=SideBC)
    east: SideBC = field(default_factory=SideBC)
    south: SideBC = field(default_factory=SideBC)
    north: SideBC = field(default_factory=SideBC)

    def side(self, name):
        return getattr(self, name)

    def items(self):
        for name in SIDES:
            yield name, self.side(name)

    @property
    def any_fixed_pressure(self):
        return any(bc.pressure == "fixed" for _, bc in self.items())


def side_face_centers(grid, side):
    """Coordinates of the boundary face centers along one side."""
    if side == "west":
        return np.stack([np.full(grid.ny, grid.xf[0]), grid.yc], axis=-1)
    if side == "east":
        return np.stack([np.full(grid.ny, grid.xf[-1]), grid.yc], axis=-1)
    if side == "south":
        return np.stack([grid.xc, np.full(grid.nx, grid.yf[0])], axis=-1)
    if side == "north":
        return np.stack([grid.xc, np.full(grid.nx, grid.yf[-1])], axis=-1)
    raise ValueError(f"unknown side {side!r}")


def side_face_areas(grid, side):
    return grid.dy if side in ("west", "east") else grid.dx


def boundary_velocity_values(grid, side, bc, t):
    """Face velocity (n, 2) for sides that pin it; None for zero-gradient
    and outflow (the latter keeps its own transported values)."""
    n = grid.ny if side in ("west", "east") else grid.nx
    if bc.velocity == "no-slip":
        return np.zeros((n, 2))
    if bc.velocity == "dirichlet":
        return np.broadcast_to(np.asarray(bc.value, dtype=float), (n, 2)).copy()
    if bc.velocity == "profile":
        coords = side_face_centers(grid, side)
        s = coords[:, 1] if side in ("west", "east") else coords[:, 0]
        vals = np.asarray(bc.profile(t, s), dtype=float)
        if vals.shape != (n, 2):
            raise ValueError(f"profile must return shape ({n}, 2)")
        return vals
    return None


class FaceGeometry:
    """Precomputed interpolation weights, distances and areas."""

    def __init__(self, grid):
        self.grid = grid
        xc, yc, xf, yf = grid.xc, grid.yc, grid.xf, grid.yf
        # internal x-faces k = 0..nx-2 between cells k and k+1
        self.dxc = xc[1:] - xc[:-1]                      # center distances
        self.wx = (xc[1:] - xf[1:-1]) / self.dxc         # weight of cell k
        self.dyc = yc[1:] - yc[:-1]
        self.wy = (yc[1:] - yf[1:-1]) / self.dyc
        self.ax = grid.dy                                # x-face area per j
        self.ay = grid.dx                                # y-face area per i
        # boundary face to first-center distances
        self.d_west = xc[0] - xf[0]
        self.d_east = xf[-1] - xc[-1]
        self.d_south = yc[0] - yf[0]
        self.d_north = yf[-1] - yc[-1]

    def boundary_distance(self, side):
        return getattr(self, f"d_{side}")


def interpolate_to_faces(geom, c):
    """Linear interpolation of a cell field to internal faces.

    Returns (fx, fy) with shapes (nx-1, ny) and (nx, ny-1).
    """
    wx = geom.wx[:, None]
    fx = wx * c[:-1, :] + (1.0 - wx) * c[1:, :]
    wy = geom.wy[None, :]
    fy = wy * c[:, :-1] + (1.0 - wy) * c[:, 1:]
    return fx, fy


def pressure_face_values(geom, boundaries, p):
    """Pressure at all faces including boundaries (zero-gradient mirrors
    the adjacent cell, fixed sides use their set value)."""
    grid = geom.grid
    fx = np.empty((grid.nx + 1, grid.ny))
    fy = np.empty((grid.nx, grid.ny + 1))
    ifx, ify = interpolate_to_faces(geom, p)
    fx[1:-1, :] = ifx
    fy[:, 1:-1] = ify
    for side, bc in boundaries.items():
        if bc.pressure == "fixed":
            val = bc.p_value
        else:
            val = None
        if side == "west":
            fx[0, :] = p[0, :] if val is None else val
        elif side == "east":
            fx[-1, :] = p[-1, :] if val is None else val
        elif side == "south":
            fy[:, 0] = p[:, 0] if val is None else val
        else:
            fy[:, -1] = p[:, -1] if val is None else val
    return fx, fy


def pressure_gradient(geom, boundaries, p):
    """Gauss cell-center gradient of the pressure, shape (nx, ny, 2)."""
    grid = geom.grid
    fx, fy = pressure_face_values(geom, boundaries, p)
    g = np.empty((grid.nx, grid.ny, 2))
    g[..., 0] = (fx[1:, :] - fx[:-1, :]) / grid.dx[:, None]
    g[..., 1] = (fy[:, 1:] - fy[:, :-1]) / grid.dy[None, :]
    return g


def flux_divergence(phi_x, phi_y):
    """Net outflow per cell from the face flux pair."""
    return (phi_x[1:, :] - phi_x[:-1, :]) + (phi_y[:, 1:] - phi_y[:, :-1])


def upwind_face_values(c, flux, axis):
    """First-order upwind face values on internal faces along ``axis``."""
    if axis == 0:
        lo, hi = c[:-1, :], c[1:, :]
    else:
        lo, hi = c[:, :-1], c[:, 1:]
    return np.where(flux >= 0.0, lo, hi)


def muscl_face_values(geom, c, flux, axis):
    """Second-order upwind (limited) face values on internal faces.

    The upwind cell value is extrapolated to the face with a minmod-limited
    one-sided slope; faces whose far-upwind neighbor would leave the grid
    fall back to first order, and exactly balanced faces (zero flux) take
    the central average.
    """
    grid = geom.grid
    if axis == 0:
        cm, cp = c[:-1, :], c[1:, :]                 # cells k, k+1 per face k
        xc = grid.xc[:, None]
        xf = grid.xf[1:-1][:, None]
        coord_m, coord_p = xc[:-1], xc[1:]
        w = geom.wx[:, None]
    else:
        cm, cp = c[:, :-1], c[:, 1:]
        yc = grid.yc[None, :]
        yf = grid.yf[1:-1][None, :]
        coord_m, coord_p = yc[:, :-1], yc[:, 1:]
        xf = yf
        w = geom.wy[None, :]

    central = w * cm + (1.0 - w) * cp
    grad_down = (cp - cm) / (coord_p - coord_m)      # slope across the face

    out = np.where(flux >= 0.0, cm, cp)              # first-order base
    # positive flux at face k: upwind cell k, far-upwind k-1 (needs k >= 1);
    # negative flux: upwind cell k+1, far-upwind k+2 (needs k <= last-1)
    if axis == 0 and grad_down.shape[0] > 1:
        slope = _minmod(grad_down[1:, :], grad_down[:-1, :])
        extr = cm[1:, :] + (xf[1:] - coord_m[1:]) * slope
        out[1:, :] = np.where(flux[1:, :] >= 0.0, extr, out[1:, :])
        slope = _minmod(grad_down[:-1, :], grad_down[1:, :])
        extr = cp[:-1, :] - (coord_p[:-1] - xf[:-1]) * slope
        out[:-1, :] = np.where(flux[:-1, :] < 0.0, extr, out[:-1, :])
    elif axis == 1 and grad_down.shape[1] > 1:
        slope = _minmod(grad_down[:, 1:], grad_down[:, :-1])
        extr = cm[:, 1:] + (xf[:, 1:] - coord_m[:, 1:]) * slope
        out[:, 1:] = np.where(flux[:, 1:] >= 0.0, extr, out[:, 1:])
        slope = _minmod(grad_down[:, :-1], grad_down[:, 1:])
        extr = cp[:, :-1] - (coord_p[:, :-1] - xf[:, :-1]) * slope
        out[:, :-1] = np.where(flux[:, :-1] < 0.0, extr, out[:, :-1])

    return np.where(flux == 0.0, central, out)


def _minmod(a, b):
    same = a * b > 0.0
    return np.where(same, np.where(np.abs(a) < np.abs(b), a, b), 0.0)
