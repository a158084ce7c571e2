"""Partitioned coupling between the flow stepper and the cantilever beam.

Per time step, in order: (1) feedback force at the markers from the
current fluid velocity and the beam's motion history, (2) spread and
advance the fluid, (3) advance the beam under the reaction load. Marker
positions for the next step are regenerated from the new deflection.

The beam lies along x with the clamped root at ``root``; markers sit on
the beam axis (thickness enters through the structural properties only).
The fluid forcing F is kinematic (per unit mass), so the reaction load
per unit beam length is -A_t * rho_fluid * F_y transferred from markers
to nodes with arc-length weights.

The derivative gain makes the load partly proportional to accelerations,
and acceleration fed back with a lag pumps energy into the structure at
a rate growing like frequency cubed, which the proportional damping
(growing like frequency squared) cannot hold below the top modes of the
discrete beam: transmitted explicitly, the gamma part of the load is
unconditionally unstable in water no matter how it is sampled. The beam
therefore carries the whole derivative-gain reaction implicitly, as
added inertia -gamma A_t rho_f per unit length on its left-hand side
(the relative-acceleration load evaluated at the level being solved,
with the fluid side of it folded into the same inertia bound). The
integral and proportional parts of the reaction go through explicitly
as they are. The coupling stays strictly sequential: one force
evaluation, one fluid solve, one beam solve per step, and the force
spread into the fluid is the plain controller output.
"""

from dataclasses import dataclass, field

import numpy as np

from .beam import BeamProperties, BeamSolver, BeamState, tip_excitation
from .forcing import ForcingController, LagrangianBoundary, segment_markers
from .mesh import build_stretched_grid
from .operators import Boundaries, SideBC
from .piso import FlowSolver, SolverDiverged
from .beam import BeamDivergence

__all__ = ["FsiCase", "FsiResult", "run_fsi_case", "WATER", "AIR"]

WATER = {"rho": 1000.0, "mu": 1.0e-3}
AIR = {"rho": 1.204, "mu": 1.8e-5}


@dataclass
class FsiCase:
    """Configuration of one beam-in-fluid run."""

    beam: BeamProperties = field(default_factory=BeamProperties)
    rho_fluid: float = 1000.0
    mu_fluid: float = 1.0e-3
    alpha: float = -2.0e3
    beta: float = -7.0e2
    gamma: float = 0.0
    dt: float = 2.0e-5
    n_steps: int = 10000
    n_beam_cells: int = 20
    n_markers: int = 21
    excitation_amplitude: float = 1.0
    excitation_steps: int = 10
    root: tuple = (0.425, 0.5)
    bounds: tuple = (0.0, 1.0, 0.0, 1.0)
    refined_box: tuple = (0.40, 0.61, 0.41, 0.59)
    h_fine: float = 0.0075
    scheme: str = "bdf1"
    u_ref: float = 0.1


@dataclass
class FsiResult:
    status: str                  # "completed" | "diverged"
    stage: str = ""              # failing sub-solver when diverged
    message: str = ""
    t: np.ndarray = None
    tip: np.ndarray = None
    avg: np.ndarray = None
    beam_state: BeamState = None
    solver: FlowSolver = None

    @property
    def ok(self):
        return self.status == "completed"


def _do_nothing_boundaries():
    side = dict(velocity="zero-gradient", pressure="fixed", p_value=0.0)
    return Boundaries(west=SideBC(**side), east=SideBC(**side),
                      south=SideBC(**side), north=SideBC(**side))


def marker_deflections(beam_r, length, marker_s):
    """Beam nodal deflections linearly interpolated at marker arc
    positions ``marker_s`` in [0, L]."""
    nodes = np.linspace(0.0, length, beam_r.size)
    return np.interp(marker_s, nodes, beam_r)


def load_transfer(marker_q, marker_s, length, n_nodes):
    """Arc-length-weighted transfer of per-length marker loads to nodes.

    Each marker carries its tributary arc ds; the two surrounding nodes
    split it linearly. Dividing by the node's own tributary length keeps
    the result a distributed load (force/length) with the total force
    conserved: sum(node_q * node_len) = sum(marker_q * ds).
    """
    marker_q = np.asarray(marker_q, dtype=float)
    n_markers = marker_q.size
    ds = length / (n_markers - 1)
    dx = length / (n_nodes - 1)
    pos = np.asarray(marker_s) / dx
    i_lo = np.clip(pos.astype(int), 0, n_nodes - 2)
    w = pos - i_lo
    node_force = np.zeros(n_nodes)
    np.add.at(node_force, i_lo, (1.0 - w) * marker_q * ds)
    np.add.at(node_force, i_lo + 1, w * marker_q * ds)
    node_len = np.full(n_nodes, dx)
    node_len[0] = node_len[-1] = 0.5 * dx
    return node_force / node_len


def run_fsi_case(case, on_step=None):
    """Advance the coupled system for ``case.n_steps`` steps."""
    grid = build_stretched_grid(case.bounds, case.refined_box,
                                h_fine=case.h_fine, ratio=1.2)
    solver = FlowSolver(grid, _do_nothing_boundaries(),
                        nu=case.mu_fluid / case.rho_fluid, dt=case.dt,
                        scheme=case.scheme, u_ref=case.u_ref)

    length = case.beam.length
    x0, y0 = case.root
    pts, _ = segment_markers((x0, y0), (x0 + length, y0), case.n_markers)
    marker_s = pts[:, 0] - x0
    ds = length / (case.n_markers - 1)
    boundary = LagrangianBoundary(grid, pts, ds)
    ctrl = ForcingController(alpha=case.alpha, beta=case.beta,
                             gamma=case.gamma)

    area = case.beam.area
    mass_added = -case.gamma * area * case.rho_fluid
    beam_solver = BeamSolver(case.beam, case.n_beam_cells, case.dt,
                             mass_extra=mass_added)
    beam = BeamState.rest(case.n_beam_cells)

    n_nodes = case.n_beam_cells + 1
    t_hist = np.empty(case.n_steps)
    tip_hist = np.empty(case.n_steps)
    avg_hist = np.empty(case.n_steps)

    stage = ""
    status, message = "completed", ""
    k = 0
    try:
        for k in range(case.n_steps):
            t = solver.time

            # stage 1: feedback force from current fluid + beam history
            stage = "forcing"
            y_now = marker_deflections(beam.r, length, marker_s)
            y_prev = marker_deflections(beam.r_prev, length, marker_s)
            new_pts = np.column_stack([pts[:, 0], y0 + y_now])
            boundary.move(new_pts)
            u_b = np.zeros((case.n_markers, 2))
            u_b[:, 1] = (y_now - y_prev) / case.dt
            u_ib = boundary.interpolate(solver.u)
            F = ctrl.force(u_ib, u_b, case.dt)

            # stage 2: spread and advance the fluid
            stage = "fluid"
            forcing = np.zeros((grid.nx, grid.ny, 2))
            boundary.spread(F, forcing)
            info = solver.step(forcing=forcing)

            # stage 3: advance the beam; the derivative-gain reaction is
            # already on the beam's LHS as mass_added, so the explicit
            # load carries the integral and proportional pieces only
            stage = "structure"
            slip_y = u_ib[:, 1] - u_b[:, 1]
            f_beam = case.alpha * ctrl.integral[:, 1] + case.beta * slip_y
            marker_load = -area * case.rho_fluid * f_beam
            load = load_transfer(marker_load, marker_s, length, n_nodes)
            tip = tip_excitation(t, case.dt,
                                 amplitude=case.excitation_amplitude,
                                 n_steps=case.excitation_steps)
            beam = beam_solver.step(beam, load=load, tip_force=tip)

            t_hist[k] = beam.time
            tip_hist[k] = beam.r[-1]
            avg_hist[k] = beam.r.mean()
            if on_step is not None:
                on_step(k, solver, beam, info)
    except (SolverDiverged, BeamDivergence, ValueError) as exc:
        # ValueError: markers pushed outside the refined region, which
        # only happens once the structure is already blowing up
        status, message = "diverged", str(exc)
        t_hist, tip_hist, avg_hist = (a[:k] for a in
                                      (t_hist, tip_hist, avg_hist))

    return FsiResult(status=status, stage=stage if status == "diverged" else "",
                     message=message, t=t_hist, tip=tip_hist, avg=avg_hist,
                     beam_state=beam, solver=solver)
