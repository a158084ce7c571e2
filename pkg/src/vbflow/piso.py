"""Pressure-implicit (PISO) incompressible flow stepper.

Collocated cell-centered velocity and pressure with Rhie-Chow face fluxes.
Each step does

1. advective-outflow boundary update and global mass rebalance,
2. implicit momentum predictor: first-order upwind convection plus
   orthogonal diffusion on the matrix, a deferred second-order upwind
   correction, the time history and the explicit body forcing on the
   right-hand side, convected by the extrapolated divergence-free flux,
3. two pressure correctors; each solves a variable-coefficient Poisson
   equation, updates the face fluxes to discrete continuity and moves the
   cell velocities with the consistent gradient.

Time schemes: "bdf1" and "bdf2" (three-level backward); the second-order
scheme extrapolates the convecting flux and the deferred correction from
the two stored levels and bootstraps its first step with "bdf1".
Pressure is kinematic (divided by density) throughout; body forcing is
per unit mass.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .operators import (
    Boundaries,
    FaceGeometry,
    boundary_velocity_values,
    flux_divergence,
    interpolate_to_faces,
    muscl_face_values,
    pressure_gradient,
    upwind_face_values,
)
from .poisson import PressurePoisson

__all__ = ["FlowSolver", "SolverDiverged", "StepInfo", "compute_cfl"]


class SolverDiverged(RuntimeError):
    """Raised when the velocity field blows up or a solve stalls."""


@dataclass
class StepInfo:
    step: int
    time: float
    dt: float
    cfl: float
    divergence: float
    momentum_iters: int
    poisson_iters: int
    outflow_defect: float = 0.0


def compute_cfl(u, grid, dt):
    """max over cells of (|u|/dx + |v|/dy) * dt."""
    conv = (np.abs(u[..., 0]) / grid.dx[:, None]
            + np.abs(u[..., 1]) / grid.dy[None, :])
    return float(conv.max() * dt)


class _MomentumMatrix:
    """Five-point operator shared by both velocity components."""

    def __init__(self, a_p, a_w, a_e, a_s, a_n):
        self.a_p = a_p
        self.a_w = a_w
        self.a_e = a_e
        self.a_s = a_s
        self.a_n = a_n
        self.shape2d = a_p.shape
        n = a_p.size
        self._op = spla.LinearOperator((n, n), matvec=self._matvec,
                                       dtype=np.float64)
        inv_diag = 1.0 / a_p.ravel()
        self._jacobi = spla.LinearOperator((n, n), matvec=lambda x: inv_diag * x,
                                           dtype=np.float64)

    def offdiag(self, q):
        y = np.zeros(q.shape, dtype=np.float64)
        y[1:, :] += self.a_w[1:, :] * q[:-1, :]
        y[:-1, :] += self.a_e[:-1, :] * q[1:, :]
        y[:, 1:] += self.a_s[:, 1:] * q[:, :-1]
        y[:, :-1] += self.a_n[:, :-1] * q[:, 1:]
        return y

    def _matvec(self, x):
        q = x.reshape(self.shape2d)
        return (self.a_p * q + self.offdiag(q)).ravel()

    def solve(self, b, x0, rtol=1e-7, maxiter=300):
        bl = b.ravel()
        b_norm = np.linalg.norm(bl)
        # roundoff-scale right-hand sides mean a zero solution: chasing a
        # relative tolerance there just breaks the iteration down
        tiny = 1e-13 * np.abs(self.a_p).max() * np.sqrt(bl.size)
        if b_norm <= tiny:
            self.last_iterations = 0
            return np.zeros(self.shape2d)
        target = max(rtol * b_norm, tiny)
        if np.linalg.norm(bl - self._op @ x0.ravel()) <= target:
            self.last_iterations = 0
            return x0.copy()

        count = [0]

        def cb(_):
            count[0] += 1

        x, info = spla.bicgstab(self._op, bl, x0=x0.ravel(),
                                rtol=rtol, atol=tiny, maxiter=maxiter,
                                M=self._jacobi, callback=cb)
        if info != 0:
            # breakdown right at the tolerance still counts as converged
            if np.linalg.norm(bl - self._op @ x) <= 10.0 * target:
                info = 0
        if info != 0:
            raise SolverDiverged(f"momentum solve stalled (info={info})")
        self.last_iterations = count[0]
        return x.reshape(self.shape2d)


class FlowSolver:
    def __init__(self, grid, boundaries, nu, dt, scheme="bdf2",
                 convection="sou", u0=None, p0=None, u_ref=1.0,
                 blowup_factor=50.0, n_correctors=2):
        if scheme not in ("bdf1", "bdf2"):
            raise ValueError(f"unknown time scheme {scheme!r}")
        if convection not in ("fou", "sou"):
            raise ValueError(f"unknown convection scheme {convection!r}")
        if not isinstance(boundaries, Boundaries):
            raise TypeError("boundaries must be a Boundaries instance")
        self.grid = grid
        self.boundaries = boundaries
        self.nu = float(nu)
        self.dt = float(dt)
        self.scheme = scheme
        self.convection = convection
        self.u_ref = float(u_ref)
        self.blowup_factor = float(blowup_factor)
        self.n_correctors = int(n_correctors)

        self.geom = FaceGeometry(grid)
        self.vol = grid.volumes
        self.time = 0.0
        self.step_index = 0

        nx, ny = grid.nx, grid.ny
        self.u = np.zeros((nx, ny, 2)) if u0 is None else np.array(u0, dtype=float)
        if self.u.shape != (nx, ny, 2):
            raise ValueError("u0 must have shape (nx, ny, 2)")
        self.p = np.zeros((nx, ny)) if p0 is None else np.array(p0, dtype=float)
        self.u_prev = self.u.copy()

        self._outflow = {}
        for side, bc in boundaries.items():
            if bc.velocity == "outflow":
                self._outflow[side] = self._interior_face_velocity(side)
        self._has_fixed_p = boundaries.any_fixed_pressure
        self.poisson = PressurePoisson(grid, singular=not self._has_fixed_p)

        self.phi_x, self.phi_y = self._flux_from_velocity(self.u, self.time)
        self._project_initial_flux()
        self.phi_x_prev = self.phi_x.copy()
        self.phi_y_prev = self.phi_y.copy()

    # ------------------------------------------------------------------
    # boundary helpers
    # ------------------------------------------------------------------

    def _interior_face_velocity(self, side):
        if side == "west":
            return self.u[0, :, :].copy()
        if side == "east":
            return self.u[-1, :, :].copy()
        if side == "south":
            return self.u[:, 0, :].copy()
        return self.u[:, -1, :].copy()

    def _side_values(self, t):
        """Known face velocities per side at time t (None when the side
        does not pin them)."""
        vals = {}
        for side, bc in self.boundaries.items():
            if bc.velocity == "outflow":
                vals[side] = self._outflow[side]
            else:
                vals[side] = boundary_velocity_values(self.grid, side, bc, t)
        return vals

    def _boundary_normal_flux(self, side, values):
        """Signed face flux (positive in +x or +y) from face velocities."""
        area = self.geom.ax if side in ("west", "east") else self.geom.ay
        comp = 0 if side in ("west", "east") else 1
        return values[:, comp] * area

    def _apply_boundary_fluxes(self, phi_x, phi_y, side_values, hbya=None):
        """Fill the boundary columns of a flux pair. Prescribed sides use
        their face values; free sides (zero-gradient velocity) copy the
        adjacent cell of ``hbya`` (or the solver velocity)."""
        field = self.u if hbya is None else hbya
        for side, bc in self.boundaries.items():
            vals = side_values[side]
            if vals is None:
                if side == "west":
                    vals = field[0, :, :]
                elif side == "east":
                    vals = field[-1, :, :]
                elif side == "south":
                    vals = field[:, 0, :]
                else:
                    vals = field[:, -1, :]
            flux = self._boundary_normal_flux(side, vals)
            if side == "west":
                phi_x[0, :] = flux
            elif side == "east":
                phi_x[-1, :] = flux
            elif side == "south":
                phi_y[:, 0] = flux
            else:
                phi_y[:, -1] = flux

    def _flux_from_velocity(self, u, t):
        nx, ny = self.grid.nx, self.grid.ny
        phi_x = np.zeros((nx + 1, ny))
        phi_y = np.zeros((nx, ny + 1))
        fx, _ = interpolate_to_faces(self.geom, u[..., 0])
        _, fy = interpolate_to_faces(self.geom, u[..., 1])
        phi_x[1:-1, :] = fx * self.geom.ax[None, :]
        phi_y[:, 1:-1] = fy * self.geom.ay[:, None]
        self._apply_boundary_fluxes(phi_x, phi_y, self._side_values(t))
        return phi_x, phi_y

    def _project_initial_flux(self):
        """One projection with unit-scale transmissibilities so the run
        starts from a discretely divergence-free flux."""
        d_x = self.geom.ax[None, :] / self.geom.dxc[:, None]
        d_y = self.geom.ay[:, None] / self.geom.dyc[None, :]
        d_bound = self._boundary_transmissibility(np.ones_like(self.vol))
        self.poisson.update(d_x, d_y, d_bound)
        rhs = -flux_divergence(self.phi_x, self.phi_y)
        for side, db in d_bound.items():
            self._add_fixed_p_rhs(rhs, side, db)
        q = self.poisson.solve(rhs)
        self._correct_fluxes(self.phi_x, self.phi_y, q, d_x, d_y, d_bound)

    def _boundary_transmissibility(self, r_v):
        """Fixed-pressure sides: transmissibility of the half-cell link."""
        d_bound = {}
        for side, bc in self.boundaries.items():
            if bc.pressure != "fixed":
                continue
            d = self.geom.boundary_distance(side)
            if side == "west":
                d_bound[side] = r_v[0, :] * self.geom.ax / d
            elif side == "east":
                d_bound[side] = r_v[-1, :] * self.geom.ax / d
            elif side == "south":
                d_bound[side] = r_v[:, 0] * self.geom.ay / d
            else:
                d_bound[side] = r_v[:, -1] * self.geom.ay / d
        return d_bound

    def _add_fixed_p_rhs(self, rhs, side, db):
        p_b = self.boundaries.side(side).p_value
        if p_b == 0.0:
            return
        if side == "west":
            rhs[0, :] += db * p_b
        elif side == "east":
            rhs[-1, :] += db * p_b
        elif side == "south":
            rhs[:, 0] += db * p_b
        else:
            rhs[:, -1] += db * p_b

    def _correct_fluxes(self, phi_x, phi_y, p, d_x, d_y, d_bound):
        phi_x[1:-1, :] -= d_x * (p[1:, :] - p[:-1, :])
        phi_y[:, 1:-1] -= d_y * (p[:, 1:] - p[:, :-1])
        for side, db in d_bound.items():
            p_b = self.boundaries.side(side).p_value
            if side == "west":
                phi_x[0, :] -= db * (p[0, :] - p_b)
            elif side == "east":
                phi_x[-1, :] -= db * (p_b - p[-1, :])
            elif side == "south":
                phi_y[:, 0] -= db * (p[:, 0] - p_b)
            else:
                phi_y[:, -1] -= db * (p_b - p[:, -1])

    # ------------------------------------------------------------------
    # advective outflow
    # ------------------------------------------------------------------

    def _net_prescribed_inflow(self, side_values):
        q_in = 0.0
        for side, bc in self.boundaries.items():
            if bc.velocity == "outflow" or side_values[side] is None:
                continue
            flux = self._boundary_normal_flux(side, side_values[side])
            sign = 1.0 if side in ("west", "south") else -1.0
            q_in += sign * flux.sum()
        return q_in

    def _update_outflow(self, t_new):
        """Transport the stored outflow values and rebalance global mass."""
        if not self._outflow:
            return 0.0
        side_values = self._side_values(t_new)
        q_in = self._net_prescribed_inflow(side_values)

        areas, normals = [], []
        for side, vals in self._outflow.items():
            interior = self._interior_face_velocity(side)
            d = self.geom.boundary_distance(side)
            comp = 0 if side in ("west", "east") else 1
            a = max(q_in, 0.0) / self._outflow_area_total()
            lam = min(a * self.dt / d, 1.0)
            vals += lam * (interior - vals)
            areas.append(self.geom.ax if side in ("west", "east") else self.geom.ay)
            normals.append((side, comp))

        if self._has_fixed_p:
            return 0.0  # pressure boundary absorbs any imbalance

        # rescale normal components so outflow matches the inflow exactly
        q_out = 0.0
        a_tot = 0.0
        for (side, comp), area in zip(normals, areas):
            sign = -1.0 if side in ("west", "south") else 1.0
            q_out += sign * (self._outflow[side][:, comp] * area).sum()
            a_tot += area.sum()
        if q_out > 1e-12 * max(abs(q_in), 1e-300) and q_in > 0.0:
            factor = q_in / q_out
            for (side, comp), _ in zip(normals, areas):
                self._outflow[side][:, comp] *= factor
        else:
            for (side, comp), area in zip(normals, areas):
                sign = -1.0 if side in ("west", "south") else 1.0
                self._outflow[side][:, comp] += sign * (q_in - q_out) / a_tot

        q_check = 0.0
        for (side, comp), area in zip(normals, areas):
            sign = -1.0 if side in ("west", "south") else 1.0
            q_check += sign * (self._outflow[side][:, comp] * area).sum()
        return abs(q_check - q_in) / max(abs(q_in), 1e-300)

    def _outflow_area_total(self):
        tot = 0.0
        for side in self._outflow:
            area = self.geom.ax if side in ("west", "east") else self.geom.ay
            tot += area.sum()
        return tot

    # ------------------------------------------------------------------
    # assembly
    # ------------------------------------------------------------------

    def _assemble(self, phi_bar, side_values):
        """Matrix coefficients shared by both components plus the per-side
        boundary outward fluxes (needed again for the right-hand side)."""
        grid, geom = self.grid, self.geom
        nx, ny = grid.nx, grid.ny
        c0 = 1.0 if self._order() == 1 else 1.5
        a_p = c0 * self.vol / self.dt * np.ones((nx, ny))
        a_w = np.zeros((nx, ny))
        a_e = np.zeros((nx, ny))
        a_s = np.zeros((nx, ny))
        a_n = np.zeros((nx, ny))
        phi_bx, phi_by = phi_bar

        f = phi_bx[1:-1, :]
        a_e[:-1, :] += np.minimum(f, 0.0)
        a_p[:-1, :] += np.maximum(f, 0.0)
        a_w[1:, :] -= np.maximum(f, 0.0)
        a_p[1:, :] -= np.minimum(f, 0.0)
        d = self.nu * geom.ax[None, :] / geom.dxc[:, None]
        a_e[:-1, :] -= d
        a_w[1:, :] -= d
        a_p[:-1, :] += d
        a_p[1:, :] += d

        f = phi_by[:, 1:-1]
        a_n[:, :-1] += np.minimum(f, 0.0)
        a_p[:, :-1] += np.maximum(f, 0.0)
        a_s[:, 1:] -= np.maximum(f, 0.0)
        a_p[:, 1:] -= np.minimum(f, 0.0)
        d = self.nu * geom.ay[:, None] / geom.dyc[None, :]
        a_n[:, :-1] -= d
        a_s[:, 1:] -= d
        a_p[:, :-1] += d
        a_p[:, 1:] += d

        out_fluxes = {}
        for side, bc in self.boundaries.items():
            if side == "west":
                f_out = -phi_bx[0, :]
                sl = (0, slice(None))
            elif side == "east":
                f_out = phi_bx[-1, :]
                sl = (-1, slice(None))
            elif side == "south":
                f_out = -phi_by[:, 0]
                sl = (slice(None), 0)
            else:
                f_out = phi_by[:, -1]
                sl = (slice(None), -1)
            out_fluxes[side] = f_out

            if bc.velocity == "zero-gradient":
                a_p[sl] += f_out
            else:
                a_p[sl] += np.maximum(f_out, 0.0)
            if bc.velocity in ("dirichlet", "no-slip", "profile"):
                area = self.geom.ax if side in ("west", "east") else self.geom.ay
                a_p[sl] += self.nu * area / geom.boundary_distance(side)
        return _MomentumMatrix(a_p, a_w, a_e, a_s, a_n), out_fluxes

    def _boundary_rhs(self, rhs, side_values, out_fluxes):
        """Inflow convection and Dirichlet diffusion boundary terms."""
        for side, bc in self.boundaries.items():
            vals = side_values[side]
            if vals is None:
                continue
            f_out = out_fluxes[side]
            conv = -np.minimum(f_out, 0.0)
            if side == "west":
                sl = (0, slice(None))
            elif side == "east":
                sl = (-1, slice(None))
            elif side == "south":
                sl = (slice(None), 0)
            else:
                sl = (slice(None), -1)
            rhs[sl] += conv[:, None] * vals
            if bc.velocity in ("dirichlet", "no-slip", "profile"):
                area = self.geom.ax if side in ("west", "east") else self.geom.ay
                diff = self.nu * area / self.geom.boundary_distance(side)
                rhs[sl] += diff[:, None] * vals

    def _deferred_correction(self, rhs, phi_bar, u_bar):
        phi_bx, phi_by = phi_bar
        fx = phi_bx[1:-1, :]
        fy = phi_by[:, 1:-1]
        for c in range(2):
            comp = u_bar[..., c]
            hi = muscl_face_values(self.geom, comp, fx, axis=0)
            lo = upwind_face_values(comp, fx, axis=0)
            corr = fx * (hi - lo)
            rhs[:-1, :, c] -= corr
            rhs[1:, :, c] += corr
            hi = muscl_face_values(self.geom, comp, fy, axis=1)
            lo = upwind_face_values(comp, fy, axis=1)
            corr = fy * (hi - lo)
            rhs[:, :-1, c] -= corr
            rhs[:, 1:, c] += corr

    def _order(self):
        return 1 if (self.scheme == "bdf1" or self.step_index == 0) else 2

    # ------------------------------------------------------------------
    # main step
    # ------------------------------------------------------------------

    def step(self, forcing=None):
        grid, geom = self.grid, self.geom
        nx, ny = grid.nx, grid.ny
        dt = self.dt
        t_new = self.time + dt
        order = self._order()

        outflow_defect = self._update_outflow(t_new)
        side_values = self._side_values(t_new)

        if order == 1:
            phi_bar = (self.phi_x, self.phi_y)
            u_bar = self.u
        else:
            phi_bar = (2.0 * self.phi_x - self.phi_x_prev,
                       2.0 * self.phi_y - self.phi_y_prev)
            u_bar = 2.0 * self.u - self.u_prev

        matrix, out_fluxes = self._assemble(phi_bar, side_values)

        rhs = np.empty((nx, ny, 2))
        if order == 1:
            rhs[:] = (self.vol / dt)[..., None] * self.u
        else:
            rhs[:] = (self.vol / dt)[..., None] * (2.0 * self.u
                                                   - 0.5 * self.u_prev)
        if forcing is not None:
            rhs += self.vol[..., None] * forcing
        if self.convection == "sou":
            self._deferred_correction(rhs, phi_bar, u_bar)
        self._boundary_rhs(rhs, side_values, out_fluxes)

        # predictor with the lagged pressure
        grad_p = pressure_gradient(geom, self.boundaries, self.p)
        u_star = np.empty_like(self.u)
        mom_iters = 0
        for c in range(2):
            b = rhs[..., c] - self.vol * grad_p[..., c]
            u_star[..., c] = matrix.solve(b, self.u[..., c])
            mom_iters += matrix.last_iterations

        r_v = self.vol / matrix.a_p
        d_x = (interpolate_to_faces(geom, r_v)[0]
               * geom.ax[None, :] / geom.dxc[:, None])
        d_y = (interpolate_to_faces(geom, r_v)[1]
               * geom.ay[:, None] / geom.dyc[None, :])
        d_bound = self._boundary_transmissibility(r_v)
        self.poisson.update(d_x, d_y, d_bound)

        u_new = u_star
        p_new = self.p
        poisson_iters = 0
        phi_x = np.zeros((nx + 1, ny))
        phi_y = np.zeros((nx, ny + 1))
        for _ in range(self.n_correctors):
            hbya = np.empty_like(u_new)
            for c in range(2):
                hbya[..., c] = (rhs[..., c]
                                - matrix.offdiag(u_new[..., c])) / matrix.a_p
            fx, _ = interpolate_to_faces(geom, hbya[..., 0])
            _, fy = interpolate_to_faces(geom, hbya[..., 1])
            phi_x[1:-1, :] = fx * geom.ax[None, :]
            phi_y[:, 1:-1] = fy * geom.ay[:, None]
            self._apply_boundary_fluxes(phi_x, phi_y, side_values, hbya=hbya)

            rhs_p = -flux_divergence(phi_x, phi_y)
            for side, db in d_bound.items():
                self._add_fixed_p_rhs(rhs_p, side, db)
            p_new = self.poisson.solve(rhs_p, x0=p_new)
            poisson_iters += self.poisson.last_iterations

            self._correct_fluxes(phi_x, phi_y, p_new, d_x, d_y, d_bound)
            grad_p = pressure_gradient(geom, self.boundaries, p_new)
            u_new = hbya - r_v[..., None] * grad_p

        # rotate the time levels
        self.u_prev = self.u
        self.u = u_new
        self.p = p_new
        self.phi_x_prev = self.phi_x
        self.phi_y_prev = self.phi_y
        self.phi_x = phi_x
        self.phi_y = phi_y
        self.time = t_new
        self.step_index += 1

        div = flux_divergence(phi_x, phi_y)
        div_metric = float(np.max(np.abs(div) / (self.u_ref * np.sqrt(self.vol))))
        cfl = compute_cfl(u_new, grid, dt)
        speed = np.abs(u_new).max()
        if not np.isfinite(speed) or speed > self.blowup_factor * self.u_ref:
            raise SolverDiverged(
                f"velocity blew up at t = {t_new:g} (max |u| = {speed:g})")
        return StepInfo(self.step_index, self.time, dt, cfl, div_metric,
                        mom_iters, poisson_iters, outflow_defect)

    # convenience metrics ------------------------------------------------

    def kinetic_energy(self):
        return float(0.5 * np.sum(self.vol[..., None] * self.u**2))

    def divergence_metric(self):
        div = flux_divergence(self.phi_x, self.phi_y)
        return float(np.max(np.abs(div) / (self.u_ref * np.sqrt(self.vol))))
