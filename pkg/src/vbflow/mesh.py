"""Cartesian tensor-product grids and cell-centered fields.

The flow solver works on structured, axis-aligned grids: the x and y face
coordinates are independent 1D arrays and every derived quantity (centers,
widths, volumes, face areas) is a tensor product of the two. Grids are
treated as immutable after construction; the coordinate arrays are marked
read-only.
"""

import numpy as np

__all__ = [
    "CartesianGrid",
    "Field",
    "build_uniform_grid",
    "build_stretched_grid",
]


class GridError(ValueError):
    """Raised when grid construction parameters are inconsistent."""


class CartesianGrid:
    """Axis-aligned tensor-product grid with unit depth.

    Parameters
    ----------
    x_faces, y_faces : array_like
        Strictly ascending face coordinates along each axis. Cell (i, j)
        spans [x_faces[i], x_faces[i+1]] x [y_faces[j], y_faces[j+1]].
    """

    def __init__(self, x_faces, y_faces):
        xf = np.asarray(x_faces, dtype=float).copy()
        yf = np.asarray(y_faces, dtype=float).copy()
        if xf.ndim != 1 or yf.ndim != 1 or xf.size < 2 or yf.size < 2:
            raise GridError("face coordinate arrays must be 1D with at least two entries")
        if np.any(np.diff(xf) <= 0) or np.any(np.diff(yf) <= 0):
            raise GridError("face coordinates must be strictly ascending")
        xf.flags.writeable = False
        yf.flags.writeable = False
        self.xf = xf
        self.yf = yf
        self.nx = xf.size - 1
        self.ny = yf.size - 1
        self.dx = np.diff(xf)
        self.dy = np.diff(yf)
        self.xc = 0.5 * (xf[:-1] + xf[1:])
        self.yc = 0.5 * (yf[:-1] + yf[1:])
        for arr in (self.dx, self.dy, self.xc, self.yc):
            arr.flags.writeable = False

    # ------------------------------------------------------------------
    # derived geometry
    # ------------------------------------------------------------------
    @property
    def n_cells(self):
        return self.nx * self.ny

    @property
    def volumes(self):
        """Cell volumes (areas x unit depth), shape (nx, ny)."""
        return np.outer(self.dx, self.dy)

    @property
    def bounds(self):
        return (self.xf[0], self.xf[-1], self.yf[0], self.yf[-1])

    def is_uniform(self, rel_tol=1e-12):
        """True when all cell widths agree to ``rel_tol`` along both axes."""
        hx, hy = self.dx[0], self.dy[0]
        return (
            np.all(np.abs(self.dx - hx) <= rel_tol * hx)
            and np.all(np.abs(self.dy - hy) <= rel_tol * hy)
            and abs(hx - hy) <= rel_tol * hx
        )

    @property
    def h_min(self):
        return min(self.dx.min(), self.dy.min())

    @property
    def h_max(self):
        return max(self.dx.max(), self.dy.max())

    def uniform_spacing(self, box, rel_tol=1e-9):
        """Return the uniform spacing h inside ``box`` = (x0, x1, y0, y1).

        Raises GridError if any cell overlapping the box deviates from
        uniformity by more than ``rel_tol`` — callers use this to guarantee
        that an interpolation kernel's support sits in a locally uniform
        region.
        """
        x0, x1, y0, y1 = box
        isel = (self.xf[1:] > x0) & (self.xf[:-1] < x1)
        jsel = (self.yf[1:] > y0) & (self.yf[:-1] < y1)
        if not isel.any() or not jsel.any():
            raise GridError(f"box {box} does not overlap the grid")
        widths = np.concatenate([self.dx[isel], self.dy[jsel]])
        h = widths[0]
        if np.any(np.abs(widths - h) > rel_tol * h):
            raise GridError(
                f"grid is not locally uniform inside box {box}: "
                f"widths span [{widths.min():.3e}, {widths.max():.3e}]"
            )
        return h

    def __repr__(self):
        x0, x1, y0, y1 = self.bounds
        return (
            f"CartesianGrid({self.nx}x{self.ny} cells, "
            f"x=[{x0:g},{x1:g}], y=[{y0:g},{y1:g}])"
        )


class Field:
    """Cell-centered scalar or vector field bound to a grid.

    Scalar data has shape (nx, ny); vector data has shape (nx, ny, 2) with
    component 0 along x and component 1 along y.
    """

    def __init__(self, grid, data):
        data = np.asarray(data, dtype=float)
        expected = (grid.nx, grid.ny)
        if data.shape not in (expected, expected + (2,)):
            raise ValueError(
                f"field shape {data.shape} incompatible with grid {expected}"
            )
        self.grid = grid
        self.data = data

    @classmethod
    def scalar(cls, grid, fill=0.0):
        return cls(grid, np.full((grid.nx, grid.ny), float(fill)))

    @classmethod
    def vector(cls, grid, fill=(0.0, 0.0)):
        data = np.empty((grid.nx, grid.ny, 2))
        data[..., 0], data[..., 1] = fill
        return cls(grid, data)

    @property
    def n_components(self):
        return 1 if self.data.ndim == 2 else 2

    def component(self, k):
        return self.data if self.data.ndim == 2 else self.data[..., k]

    def all_finite(self):
        return bool(np.isfinite(self.data).all())

    def copy(self):
        return Field(self.grid, self.data.copy())


# ----------------------------------------------------------------------
# grid builders
# ----------------------------------------------------------------------

def _uniform_axis(lo, hi, h, tol=0.005):
    """Face coordinates for a uniform axis; h is recomputed exactly when it
    does not divide the extent within ``tol`` relative."""
    extent = hi - lo
    if extent <= 0:
        raise GridError("domain extent must be positive")
    if h <= 0:
        raise GridError("target spacing must be positive")
    # when h does not divide the extent within tol, the cell count is rounded
    # and the spacing recomputed exactly; linspace does both at once
    n = max(1, round(extent / h))
    return np.linspace(lo, hi, n + 1)


def build_uniform_grid(bounds, h):
    """Uniform grid over ``bounds`` = (x0, x1, y0, y1) with target spacing h.

    When h does not divide an extent within 0.5% the cell count is rounded
    and the spacing recomputed exactly, so faces always land on the domain
    boundary.
    """
    x0, x1, y0, y1 = bounds
    return CartesianGrid(_uniform_axis(x0, x1, h), _uniform_axis(y0, y1, h))


def _geometric_run(h0, span, ratio):
    """Widths of a geometric run starting above h0 that fills ``span``.

    The first width is h0*r and each later one grows by r, where r <= ratio
    is adjusted (bisection) so the run lands exactly on the far edge. Widths
    are monotone non-decreasing as long as r >= 1.
    """
    if span <= 0:
        return np.empty(0)
    if span <= 1.5 * h0:
        # not enough room for a growing run; one closing cell
        return np.array([span])

    def total(r, n):
        if abs(r - 1.0) < 1e-14:
            return n * h0
        return h0 * r * (r**n - 1.0) / (r - 1.0)

    # smallest cell count that can cover the span at the requested ratio
    n = 1
    while total(ratio, n) < span:
        n += 1
    if total(1.0, n) > span:
        # even ratio 1 overshoots with n cells: use n cells of equal width
        # (span/n >= h0 is guaranteed because total(1, n-1) ... < span)
        return np.full(n, span / n)
    lo_r, hi_r = 1.0, ratio
    for _ in range(200):
        mid = 0.5 * (lo_r + hi_r)
        if total(mid, n) < span:
            lo_r = mid
        else:
            hi_r = mid
    r = 0.5 * (lo_r + hi_r)
    widths = h0 * r ** np.arange(1, n + 1)
    widths *= span / widths.sum()  # close the last femto-gap exactly
    return widths


def _stretched_axis(lo, hi, box_lo, box_hi, h, ratio):
    if not (lo <= box_lo < box_hi <= hi):
        raise GridError("refined box must lie inside the domain")
    if not (1.0 < ratio <= 1.3):
        raise GridError(f"stretch ratio {ratio} outside the allowed (1, 1.3]")
    # uniform core: recompute h so it divides the box extent exactly
    extent = box_hi - box_lo
    n_core = max(1, round(extent / h))
    if abs(n_core - extent / h) > 0.005 * (extent / h):
        n_core = max(1, round(extent / h))
    h_core = extent / n_core
    core = box_lo + h_core * np.arange(n_core + 1)

    left_w = _geometric_run(h_core, box_lo - lo, ratio)   # ordered box -> edge
    right_w = _geometric_run(h_core, hi - box_hi, ratio)
    faces = np.concatenate([
        (box_lo - np.cumsum(left_w))[::-1] if left_w.size else np.empty(0),
        core,
        box_hi + np.cumsum(right_w) if right_w.size else np.empty(0),
    ])
    # guard against roundoff on the outer edges
    faces[0], faces[-1] = lo, hi
    return faces


def build_stretched_grid(bounds, refined_box, h_fine, ratio):
    """Tensor-product grid, uniform h_fine inside ``refined_box`` and
    geometrically stretched (factor <= ratio per cell) outside.

    ``bounds`` and ``refined_box`` are (x0, x1, y0, y1) tuples. Widths are
    monotone non-decreasing moving away from the refined box along each axis.
    """
    x0, x1, y0, y1 = bounds
    bx0, bx1, by0, by1 = refined_box
    xf = _stretched_axis(x0, x1, bx0, bx1, h_fine, ratio)
    yf = _stretched_axis(y0, y1, by0, by1, h_fine, ratio)
    return CartesianGrid(xf, yf)
