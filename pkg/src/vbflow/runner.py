"""Single-run orchestration: config -> grid, solver, body, time loop.

The loop per step: reposition markers for moving bodies, interpolate the
fluid velocity to them, evaluate the feedback force, spread it, advance
the flow, record diagnostics. Divergence is returned as a result status
(sweeps treat it as data), not an exception.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, profile_function, serialize_config
from .diagnostics import aero_coefficients, masked_momentum, slip_error
from .forcing import ForcingController, LagrangianBoundary, circle_markers
from .io import SeriesWriter, ensure_dir, write_vtk_rectilinear
from .mesh import build_stretched_grid, build_uniform_grid
from .operators import SIDES, Boundaries, SideBC
from .piso import FlowSolver, SolverDiverged

__all__ = [
    "RunResult",
    "build_grid",
    "build_boundaries",
    "motion_offset",
    "run_flow_case",
]

SERIES_COLUMNS = ("t", "cd", "cl", "ex", "cfl", "divergence")


@dataclass
class RunResult:
    status: str                       # "completed" | "diverged"
    message: str = ""
    n_steps: int = 0
    final_time: float = 0.0
    series: dict = field(default_factory=dict)
    solver: object = None

    @property
    def ok(self):
        return self.status == "completed"


def build_grid(gc):
    if gc.kind == "uniform":
        return build_uniform_grid(tuple(gc.bounds), gc.h)
    return build_stretched_grid(tuple(gc.bounds), tuple(gc.refined_box),
                                h_fine=gc.h, ratio=gc.ratio)


def build_boundaries(bcfg):
    sides = {}
    for name in SIDES:
        sc = getattr(bcfg, name)
        prof = None
        if sc.velocity == "profile":
            prof = profile_function(sc.profile, sc.profile_params)
        sides[name] = SideBC(velocity=sc.velocity, value=tuple(sc.value),
                             profile=prof, pressure=sc.pressure,
                             p_value=sc.p_value)
    return Boundaries(**sides)


def motion_offset(motion, t):
    """Rigid-body center displacement at time t."""
    if motion.kind == "transverse":
        return np.array([0.0, motion.amplitude
                         * np.cos(2.0 * np.pi * motion.frequency * t)])
    if motion.kind == "inline":
        return np.array([-motion.amplitude
                         * np.sin(2.0 * np.pi * motion.frequency * t), 0.0])
    return np.zeros(2)


def motion_acceleration(motion, t):
    """Rigid-body center acceleration at time t."""
    w2 = (2.0 * np.pi * motion.frequency)**2
    return -w2 * motion_offset(motion, t)


def _build_cylinder(cfg, grid):
    body = cfg.body
    if body.n_markers is not None:
        n = int(body.n_markers)
    else:
        ds_target = body.ds_over_h * cfg.grid.h
        n = max(4, int(round(2.0 * np.pi * body.radius / ds_target)))
    pts, ds = circle_markers(tuple(body.center), body.radius, n)
    base = pts - np.asarray(body.center)[None, :]
    start = base + np.asarray(body.center) + motion_offset(cfg.motion, 0.0)
    return LagrangianBoundary(grid, start, ds), base


def run_flow_case(cfg, out_dir=None, max_steps=None, on_step=None):
    """Advance one configured rigid-body (or body-free) run to t_end.

    ``out_dir`` activates file output: a config snapshot, the diagnostics
    series and cadenced field snapshots. ``on_step`` is called with
    (step_index, solver, info) after every step.
    """
    if cfg.motion.kind == "fsi":
        raise ValueError("fsi runs are driven by the coupling module")

    grid = build_grid(cfg.grid)
    boundaries = build_boundaries(cfg.boundaries)

    u0 = None
    west = cfg.boundaries.west
    if west.velocity == "dirichlet" and any(west.value):
        u0 = np.zeros((grid.nx, grid.ny, 2))
        u0[..., 0] = west.value[0]
        u0[..., 1] = west.value[1]
    elif west.velocity == "profile" and west.profile in ("uniform",
                                                         "perturbed-uniform"):
        u0 = np.zeros((grid.nx, grid.ny, 2))
        u0[..., 0] = west.profile_params.get("ux", 1.0)

    solver = FlowSolver(grid, boundaries, nu=cfg.fluid.nu, dt=cfg.time.dt,
                        scheme=cfg.time.scheme,
                        convection=cfg.time.convection, u0=u0,
                        u_ref=cfg.u_ref)

    boundary = base = None
    ctrl = None
    moving = cfg.motion.kind in ("transverse", "inline")
    if cfg.body.kind == "cylinder":
        boundary, base = _build_cylinder(cfg, grid)
        gains = cfg.gains
        ctrl = ForcingController(alpha=gains.alpha, beta=gains.beta,
                                 gamma=gains.gamma)
    elif cfg.body.kind == "beam":
        raise ValueError("beam bodies are driven by the coupling module")

    writer = None
    snap_dir = None
    if out_dir is not None:
        ensure_dir(out_dir)
        with open(os.path.join(out_dir, "config.json"), "w") as fh:
            fh.write(serialize_config(cfg))
        writer = SeriesWriter(os.path.join(out_dir, "series.csv"),
                              SERIES_COLUMNS)
        if cfg.output.snapshot_every > 0:
            snap_dir = ensure_dir(os.path.join(out_dir, "snapshots"))

    n_steps = int(round(cfg.time.t_end / cfg.time.dt))
    if max_steps is not None:
        n_steps = min(n_steps, int(max_steps))

    rows = []
    center0 = np.asarray(cfg.body.center, dtype=float)

    # interior of a moving closed body: an impermeable incompressible
    # interior carries momentum V_b * v_body exactly, so the forcing
    # integral contains V_b * a_body of enclosed-fluid inertia on top of
    # the hydrodynamic force; subtract it from the coefficients
    vol_body = 0.0
    if cfg.body.kind == "cylinder" and moving:
        vol_body = np.pi * cfg.body.radius**2
    coeff_scale = 2.0 / (cfg.l_ref * cfg.u_ref**2)
    status, message = "completed", ""
    k = 0
    try:
        for k in range(n_steps):
            t = solver.time
            forcing = None
            cd = cl = ex = 0.0
            if boundary is not None:
                if moving:
                    off = motion_offset(cfg.motion, t)
                    boundary.move(base + center0 + off)
                    u_b = np.broadcast_to(
                        (off - motion_offset(cfg.motion, t - cfg.time.dt))
                        / cfg.time.dt, (boundary.n_markers, 2))
                else:
                    u_b = np.zeros((boundary.n_markers, 2))
                u_ib = boundary.interpolate(solver.u)
                F = ctrl.force(u_ib, u_b, cfg.time.dt)
                forcing = np.zeros((grid.nx, grid.ny, 2))
                boundary.spread(F, forcing)
                cd, cl = aero_coefficients(forcing, grid.volumes, cfg.u_ref,
                                           cfg.l_ref)
                if vol_body:
                    # second difference of the offset matches the motion
                    # the markers execute step to step
                    a_b = (motion_offset(cfg.motion, t + cfg.time.dt)
                           - 2.0 * off
                           + motion_offset(cfg.motion, t - cfg.time.dt)) \
                        / cfg.time.dt**2
                    cd += coeff_scale * vol_body * a_b[0]
                    cl += coeff_scale * vol_body * a_b[1]
                ex = slip_error(u_ib, u_b)
            info = solver.step(forcing=forcing)
            row = (info.time, cd, cl, ex, info.cfl, info.divergence)
            if (k + 1) % cfg.output.series_every == 0:
                rows.append(row)
                if writer is not None:
                    writer.write(row)
            if snap_dir is not None and (k + 1) % cfg.output.snapshot_every == 0:
                fields = {"velocity": solver.u, "pressure": solver.p}
                if forcing is not None:
                    fields["forcing"] = forcing
                write_vtk_rectilinear(
                    os.path.join(snap_dir, f"step_{k + 1:07d}.vtk"),
                    grid, fields, title=f"t = {info.time!r}")
            if on_step is not None:
                on_step(k, solver, info)
    except SolverDiverged as exc:
        status, message = "diverged", str(exc)
    finally:
        if writer is not None:
            writer.close()

    data = np.array(rows) if rows else np.zeros((0, len(SERIES_COLUMNS)))
    series = {name: data[:, i] for i, name in enumerate(SERIES_COLUMNS)}
    return RunResult(status=status, message=message,
                     n_steps=k + 1 if status == "diverged" else n_steps,
                     final_time=solver.time, series=series, solver=solver)
