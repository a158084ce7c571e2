"""Incompressible flow with feedback-forced immersed boundaries.

Subpackage map:

- ``mesh``: Cartesian tensor-product grids (uniform and stretched) and fields
- ``stability``: gain stability of the forcing scheme (characteristic
  polynomials, Jury test, analytic and numeric stability regions)
- ``forcing``: kernel interpolation/spreading and the feedback controller
- ``operators`` / ``poisson`` / ``piso``: the finite-volume flow solver
- ``beam``: Euler-Bernoulli cantilever analytics and time stepping
- ``fsi``: partitioned coupling of the beam with the flow solver
- ``diagnostics``: force coefficients and spectral estimates
- ``config`` / ``runner`` / ``bench`` / ``cli``: run orchestration
"""

__version__ = "0.1.0"

from .mesh import CartesianGrid, Field, GridError, build_stretched_grid, build_uniform_grid
from .stability import (
    C_MAX_2D,
    ScaledGains,
    analytic_region,
    char_poly_bdf1,
    char_poly_bdf2,
    jury_stable,
    max_alpha_curve,
    numeric_region,
    scale_gains,
    timestep_ratio_bdf2_vs_bdf1,
)
from .forcing import ForcingController, LagrangianBoundary, circle_markers, delta4, phi4
from .beam import BeamProperties, BeamState, beam_step, fluid_frequency_ratio, kn_roots, vacuum_frequency
from .operators import Boundaries, SideBC
from .poisson import PressurePoisson
from .piso import FlowSolver, SolverDiverged
from .config import ConfigError, RunConfig, apply_overrides, parse_config, serialize_config
from .runner import run_flow_case
from .fsi import AIR, WATER, FsiCase, FsiResult, run_fsi_case
from .bench import CASE_NAMES, load_result, run_case
from .diagnostics import aero_coefficients, dominant_frequencies, strouhal

__all__ = [
    "CartesianGrid",
    "Field",
    "GridError",
    "build_uniform_grid",
    "build_stretched_grid",
    "C_MAX_2D",
    "ScaledGains",
    "scale_gains",
    "char_poly_bdf1",
    "char_poly_bdf2",
    "jury_stable",
    "analytic_region",
    "numeric_region",
    "max_alpha_curve",
    "timestep_ratio_bdf2_vs_bdf1",
    "phi4",
    "delta4",
    "circle_markers",
    "LagrangianBoundary",
    "ForcingController",
    "BeamProperties",
    "BeamState",
    "beam_step",
    "kn_roots",
    "vacuum_frequency",
    "fluid_frequency_ratio",
    "Boundaries",
    "SideBC",
    "PressurePoisson",
    "FlowSolver",
    "SolverDiverged",
    "RunConfig",
    "ConfigError",
    "parse_config",
    "serialize_config",
    "apply_overrides",
    "run_flow_case",
    "FsiResult",
    "FsiCase",
    "run_fsi_case",
    "AIR",
    "WATER",
    "CASE_NAMES",
    "run_case",
    "load_result",
    "dominant_frequencies",
    "aero_coefficients",
    "strouhal",
    "__version__",
]
