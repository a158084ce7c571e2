"""Feedback forcing on Lagrangian boundary markers.

A body surface is sampled by markers. Fluid velocity is interpolated to the
markers through a regularized delta built from the smooth 4-point kernel;
the slip between interpolated and prescribed body velocity drives a
proportional-integral-derivative force

    F_k = alpha * sum_l (u_ib - u_b)_l * dt  +  beta * (u_ib - u_b)_k
          + gamma * (du_ib/dt - du_b/dt)_k

(per unit mass, gains <= 0) which is spread back to the grid through the
same kernel. Interpolation and spreading only touch grid cells within the
2h kernel support, so the cost per step is O(number of markers).

The kernel needs locally uniform, equal spacing in x and y; constructing a
boundary on a grid that is stretched inside the kernel support raises.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "phi4",
    "delta4",
    "LagrangianBoundary",
    "circle_markers",
    "segment_markers",
    "ForcingController",
    "interpolate_to_markers",
    "spread_to_grid",
]


def phi4(r):
    """Smooth 4-point interpolation kernel (one-dimensional, unit grid).

    Piecewise on |r| <= 1 and 1 <= |r| <= 2, zero outside; phi4(0) = 0.5,
    sum over integer shifts is 1 and the first moment vanishes.
    """
    r = np.abs(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    inner = r <= 1.0
    outer = (r > 1.0) & (r < 2.0)
    ri = r[inner]
    out[inner] = 0.125 * (3.0 - 2.0 * ri + np.sqrt(1.0 + 4.0 * ri - 4.0 * ri**2))
    ro = r[outer]
    out[outer] = 0.125 * (5.0 - 2.0 * ro - np.sqrt(-7.0 + 12.0 * ro - 4.0 * ro**2))
    return out


def delta4(dx, dy, h):
    """Two-dimensional regularized delta, phi4(dx/h) phi4(dy/h) / h^2."""
    return phi4(np.asarray(dx) / h) * phi4(np.asarray(dy) / h) / h**2


def circle_markers(center, radius, n_markers):
    """Evenly spaced markers on a circle; returns (points, chord spacing)."""
    theta = 2.0 * np.pi * np.arange(n_markers) / n_markers
    pts = np.column_stack([
        center[0] + radius * np.cos(theta),
        center[1] + radius * np.sin(theta),
    ])
    ds = 2.0 * radius * np.sin(np.pi / n_markers)
    return pts, ds


def segment_markers(start, end, n_markers):
    """Markers spread along a straight segment, endpoints included."""
    s = np.linspace(0.0, 1.0, n_markers)
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    pts = start[None, :] + s[:, None] * (end - start)[None, :]
    ds = np.linalg.norm(end - start) / (n_markers - 1)
    return pts, ds


class LagrangianBoundary:
    """Markers plus the precomputed kernel stencil against one grid.

    Positions may move every step (moving bodies rebuild the stencil by
    calling :meth:`move`). The grid must be uniform with dx = dy = h over
    the kernel support of every marker; markers must keep the support at
    least one cell away from the domain edge.
    """

    def __init__(self, grid, points, ds):
        self.grid = grid
        self.ds = float(ds)
        self._xc = grid.xc
        self._yc = grid.yc
        self.move(points)

    @property
    def n_markers(self):
        return self.points.shape[0]

    @property
    def weight_volume(self):
        """Spreading volume per marker, h * ds."""
        return self.h * self.ds

    def move(self, points):
        """Reposition the markers and rebuild the kernel stencil."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        grid = self.grid
        pad = 2.5  # kernel support (2h) plus margin, in cells
        xmin, xmax = points[:, 0].min(), points[:, 0].max()
        ymin, ymax = points[:, 1].min(), points[:, 1].max()
        h = grid.uniform_spacing((
            xmin - pad * grid.h_min, xmax + pad * grid.h_min,
            ymin - pad * grid.h_min, ymax + pad * grid.h_min,
        ))
        if h > grid.h_min * (1.0 + 1e-9):
            # body sits in a coarser uniform patch: re-check with its own h
            h = grid.uniform_spacing((
                xmin - pad * h, xmax + pad * h,
                ymin - pad * h, ymax + pad * h,
            ))
        self.h = h
        self.points = points.copy()

        # index window of the 4x4 support: cells whose centers fall within
        # 2h of the marker in each direction
        h2 = 2.0 * h
        slack = 1e-12 * h
        if (points[:, 0] - h2 < self._xc[0] - slack).any() or \
                (points[:, 0] + h2 > self._xc[-1] + slack).any() or \
                (points[:, 1] - h2 < self._yc[0] - slack).any() or \
                (points[:, 1] + h2 > self._yc[-1] + slack).any():
            raise ValueError("marker kernel support leaves the grid")
        ix = np.searchsorted(self._xc, points[:, 0] - h2)
        iy = np.searchsorted(self._yc, points[:, 1] - h2)
        ix = np.minimum(ix, grid.nx - 4)
        iy = np.minimum(iy, grid.ny - 4)
        off = np.arange(4)
        cols_x = ix[:, None] + off[None, :]           # (n, 4)
        cols_y = iy[:, None] + off[None, :]
        wx = phi4((self._xc[cols_x] - points[:, 0:1]) / h)
        wy = phi4((self._yc[cols_y] - points[:, 1:2]) / h)
        self._cells_i = np.repeat(cols_x, 4, axis=1)  # (n, 16)
        self._cells_j = np.tile(cols_y, (1, 4))
        self._w = (np.repeat(wx, 4, axis=1) * np.tile(wy, (1, 4))) / h**2
        self._flat = (self._cells_i * grid.ny + self._cells_j).ravel()

    def interpolate(self, data):
        """Kernel interpolation of cell data (nx, ny[, m]) to the markers."""
        vol = self.h**2  # uniform cell volume inside the support
        if data.ndim == 2:
            vals = data[self._cells_i, self._cells_j]
            return np.sum(self._w * vals, axis=1) * vol
        out = np.empty((self.n_markers, data.shape[2]))
        for k in range(data.shape[2]):
            vals = data[self._cells_i, self._cells_j, k]
            out[:, k] = np.sum(self._w * vals, axis=1) * vol
        return out

    def spread(self, marker_values, out):
        """Kernel spreading of per-marker values into grid field ``out``.

        Accumulates marker_value * delta * (h * ds) so that the surface
        integral of the spread density matches the marker sum.
        """
        marker_values = np.asarray(marker_values, dtype=float)
        dv = self.weight_volume
        if marker_values.ndim == 1:
            contrib = (self._w * marker_values[:, None] * dv).ravel()
            np.add.at(out.ravel(), self._flat, contrib)
        else:
            flat = out.reshape(-1, out.shape[2])
            for k in range(marker_values.shape[1]):
                contrib = (self._w * marker_values[:, k:k + 1] * dv).ravel()
                np.add.at(flat[:, k], self._flat, contrib)
        return out


def interpolate_to_markers(boundary, data):
    return boundary.interpolate(data)


def spread_to_grid(boundary, marker_values, out):
    return boundary.spread(marker_values, out)


@dataclass
class ForcingController:
    """Per-marker feedback force from the velocity slip history.

    Gains are dimensional (alpha [1/s^2], beta [1/s], gamma [-]) and must
    be <= 0 for a restoring force. The integral accumulates slip * dt
    including the current sample before the force is evaluated; derivative
    contributions are zero on the first sample.
    """

    alpha: float
    beta: float
    gamma: float = 0.0
    integral: np.ndarray | None = None
    _u_ib_prev: np.ndarray | None = field(default=None, repr=False)
    _u_b_prev: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.alpha > 0 or self.beta > 0 or self.gamma > 0:
            raise ValueError("feedback gains must be <= 0")

    def reset(self):
        self.integral = None
        self._u_ib_prev = None
        self._u_b_prev = None

    def force(self, u_ib, u_b, dt):
        """Force per unit mass at the markers for the current sample."""
        u_ib = np.asarray(u_ib, dtype=float)
        u_b = np.asarray(u_b, dtype=float)
        slip = u_ib - u_b
        if self.integral is None:
            self.integral = np.zeros_like(slip)
        self.integral = self.integral + slip * dt
        f = self.alpha * self.integral + self.beta * slip
        if self.gamma != 0.0 and self._u_ib_prev is not None:
            du_ib = (u_ib - self._u_ib_prev) / dt
            du_b = (u_b - self._u_b_prev) / dt
            f = f + self.gamma * (du_ib - du_b)
        self._u_ib_prev = u_ib.copy()
        self._u_b_prev = u_b.copy()
        return f
