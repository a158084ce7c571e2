"""Run configuration: schema, validation, serialization and profiles.

Configs are JSON documents with nested sections. Parsing is strict:
unknown keys are rejected and all problems are reported together as an
itemized list, not one at a time. Inflow profiles are referenced by
registry name so a config file stays plain data.

Units are SI throughout (lengths m, times s, density kg/m^3, dynamic
viscosity Pa s); gains are the dimensional feedback constants (alpha
[1/s^2], beta [1/s], gamma [-]), all <= 0.
"""

import json
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

__all__ = [
    "ConfigError",
    "GridConfig",
    "FluidConfig",
    "TimeConfig",
    "SideConfig",
    "BoundariesConfig",
    "BodyConfig",
    "MotionConfig",
    "GainsConfig",
    "OutputConfig",
    "RunConfig",
    "parse_config",
    "serialize_config",
    "apply_overrides",
    "profile_function",
    "PROFILE_NAMES",
]


class ConfigError(ValueError):
    """Carries the full list of validation problems."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" +
                         "\n".join(f"  - {p}" for p in self.problems))


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------

@dataclass
class GridConfig:
    kind: str = "uniform"                     # "uniform" | "stretched"
    bounds: tuple = (0.0, 1.0, 0.0, 1.0)      # x0, x1, y0, y1
    h: float = 0.05                           # target (fine) spacing
    refined_box: tuple | None = None          # stretched grids only
    ratio: float = 1.2


@dataclass
class FluidConfig:
    rho: float = 1.0
    mu: float = 0.01

    @property
    def nu(self):
        return self.mu / self.rho


@dataclass
class TimeConfig:
    scheme: str = "bdf2"                      # "bdf1" | "bdf2"
    dt: float = 0.01
    t_end: float = 1.0
    convection: str = "sou"                   # "fou" | "sou"


@dataclass
class SideConfig:
    velocity: str = "no-slip"
    value: tuple = (0.0, 0.0)
    profile: str | None = None
    profile_params: dict = field(default_factory=dict)
    pressure: str = "zero-gradient"
    p_value: float = 0.0


@dataclass
class BoundariesConfig:
    west: SideConfig = field(default_factory=SideConfig)
    east: SideConfig = field(default_factory=SideConfig)
    south: SideConfig = field(default_factory=SideConfig)
    north: SideConfig = field(default_factory=SideConfig)


@dataclass
class BodyConfig:
    kind: str = "none"                        # "none" | "cylinder" | "beam"
    center: tuple = (0.0, 0.0)                # cylinder center / beam root
    radius: float = 0.5
    ds_over_h: float = 1.0
    # beam bodies
    length: float = 0.15
    n_markers: int | None = None              # override the ds_over_h count


@dataclass
class MotionConfig:
    kind: str = "stationary"    # stationary | transverse | inline | fsi
    amplitude: float = 0.0
    frequency: float = 0.0


@dataclass
class GainsConfig:
    alpha: float = -1.0e3
    beta: float = -1.0e2
    gamma: float = 0.0


@dataclass
class OutputConfig:
    directory: str = "out"
    snapshot_every: int = 0                   # steps between VTK dumps, 0 = none
    series_every: int = 1                     # steps between CSV rows


@dataclass
class RunConfig:
    name: str = "run"
    u_ref: float = 1.0
    l_ref: float = 1.0
    grid: GridConfig = field(default_factory=GridConfig)
    fluid: FluidConfig = field(default_factory=FluidConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    boundaries: BoundariesConfig = field(default_factory=BoundariesConfig)
    body: BodyConfig = field(default_factory=BodyConfig)
    motion: MotionConfig = field(default_factory=MotionConfig)
    gains: GainsConfig = field(default_factory=GainsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS = {
    "grid": GridConfig,
    "fluid": FluidConfig,
    "time": TimeConfig,
    "boundaries": BoundariesConfig,
    "body": BodyConfig,
    "motion": MotionConfig,
    "gains": GainsConfig,
    "output": OutputConfig,
}

_LIST_FIELDS = {"bounds", "refined_box", "value", "center"}


# ---------------------------------------------------------------------------
# inflow profile registry
# ---------------------------------------------------------------------------

def _uniform_profile(params):
    ux = float(params.get("ux", 1.0))
    uy = float(params.get("uy", 0.0))

    def prof(t, s):
        vals = np.zeros((s.size, 2))
        vals[:, 0] = ux
        vals[:, 1] = uy
        return vals

    return prof


def _perturbed_uniform_profile(params):
    """Steady stream with a brief transverse pulse to break symmetry."""
    ux = float(params.get("ux", 1.0))
    amp = float(params.get("amplitude", 0.05))
    t0 = float(params.get("t0", 5.0))
    width = float(params.get("width", 2.0))

    def prof(t, s):
        vals = np.zeros((s.size, 2))
        vals[:, 0] = ux
        vals[:, 1] = amp * np.exp(-((t - t0) / width) ** 2)
        return vals

    return prof


def _pulsed_parabolic_profile(params):
    """Half-sine-in-time parabolic inflow u(t, s) = c sin(pi t/T) s (H - s)."""
    height = float(params.get("height", 0.41))
    scale = float(params.get("scale", 6.0 / 0.41**2))
    period = float(params.get("period", 8.0))

    def prof(t, s):
        vals = np.zeros((s.size, 2))
        vals[:, 0] = scale * np.sin(np.pi * t / period) * s * (height - s)
        return vals

    return prof


_PROFILES = {
    "uniform": _uniform_profile,
    "perturbed-uniform": _perturbed_uniform_profile,
    "pulsed-parabolic": _pulsed_parabolic_profile,
}

PROFILE_NAMES = tuple(sorted(_PROFILES))


def profile_function(name, params=None):
    if name not in _PROFILES:
        raise ConfigError([f"unknown profile {name!r}; "
                           f"known: {', '.join(PROFILE_NAMES)}"])
    return _PROFILES[name](params or {})


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _coerce(cls, data, path, problems):
    """Build dataclass ``cls`` from ``data``, collecting problems."""
    fields = {f: t for f, t in cls.__dataclass_fields__.items()}
    kwargs = {}
    for key, raw in data.items():
        if key not in fields:
            problems.append(f"{path}{key}: unknown key")
            continue
        default = fields[key].default
        if key in ("west", "east", "south", "north") and cls is BoundariesConfig:
            if not isinstance(raw, dict):
                problems.append(f"{path}{key}: expected a mapping")
                continue
            kwargs[key] = _coerce(SideConfig, raw, f"{path}{key}.", problems)
        elif key in _LIST_FIELDS:
            if raw is None:
                kwargs[key] = None
            else:
                try:
                    kwargs[key] = tuple(float(v) for v in raw)
                except (TypeError, ValueError):
                    problems.append(f"{path}{key}: expected a number list")
        elif key == "profile_params":
            if not isinstance(raw, dict):
                problems.append(f"{path}{key}: expected a mapping")
            else:
                kwargs[key] = dict(raw)
        elif isinstance(default, bool):
            kwargs[key] = bool(raw)
        elif isinstance(default, int) and not isinstance(default, bool):
            try:
                kwargs[key] = int(raw)
            except (TypeError, ValueError):
                problems.append(f"{path}{key}: expected an integer")
        elif isinstance(default, float):
            try:
                kwargs[key] = float(raw)
            except (TypeError, ValueError):
                problems.append(f"{path}{key}: expected a number")
        else:
            kwargs[key] = raw
    try:
        return cls(**kwargs)
    except TypeError:
        return cls()


def _validate(cfg, problems):
    g = cfg.grid
    if g.kind not in ("uniform", "stretched"):
        problems.append(f"grid.kind: unknown kind {g.kind!r}")
    if len(g.bounds) != 4:
        problems.append("grid.bounds: expected x0, x1, y0, y1")
    elif g.bounds[0] >= g.bounds[1] or g.bounds[2] >= g.bounds[3]:
        problems.append("grid.bounds: extents must be increasing")
    if not np.isfinite(g.h) or g.h <= 0:
        problems.append("grid.h: must be positive")
    if g.kind == "stretched":
        if g.refined_box is None or len(g.refined_box) != 4:
            problems.append("grid.refined_box: required for stretched grids")
        if g.ratio <= 1.0:
            problems.append("grid.ratio: must exceed 1")

    if cfg.fluid.rho <= 0:
        problems.append("fluid.rho: must be positive")
    if cfg.fluid.mu < 0:
        problems.append("fluid.mu: must be non-negative")

    t = cfg.time
    if t.scheme not in ("bdf1", "bdf2"):
        problems.append(f"time.scheme: unknown scheme {t.scheme!r}")
    if t.convection not in ("fou", "sou"):
        problems.append(f"time.convection: unknown scheme {t.convection!r}")
    if not np.isfinite(t.dt) or t.dt <= 0:
        problems.append("time.dt: must be positive")
    if t.t_end <= 0:
        problems.append("time.t_end: must be positive")

    from .operators import PRESSURE_KINDS, VELOCITY_KINDS

    for side in ("west", "east", "south", "north"):
        sc = getattr(cfg.boundaries, side)
        p = f"boundaries.{side}."
        if sc.velocity not in VELOCITY_KINDS:
            problems.append(f"{p}velocity: unknown kind {sc.velocity!r}")
        if sc.pressure not in PRESSURE_KINDS:
            problems.append(f"{p}pressure: unknown kind {sc.pressure!r}")
        if sc.pressure == "fixed" and sc.velocity != "zero-gradient":
            problems.append(f"{p}pressure: fixed pressure needs "
                            "zero-gradient velocity")
        if sc.velocity == "profile":
            if sc.profile is None:
                problems.append(f"{p}profile: required for profile velocity")
            elif sc.profile not in _PROFILES:
                problems.append(f"{p}profile: unknown profile {sc.profile!r}")

    b = cfg.body
    if b.kind not in ("none", "cylinder", "beam"):
        problems.append(f"body.kind: unknown kind {b.kind!r}")
    if b.kind == "cylinder" and b.radius <= 0:
        problems.append("body.radius: must be positive")
    if b.kind != "none" and b.ds_over_h <= 0:
        problems.append("body.ds_over_h: must be positive")
    if b.kind == "beam" and b.length <= 0:
        problems.append("body.length: must be positive")

    m = cfg.motion
    if m.kind not in ("stationary", "transverse", "inline", "fsi"):
        problems.append(f"motion.kind: unknown kind {m.kind!r}")
    if m.kind in ("transverse", "inline") and m.frequency <= 0:
        problems.append("motion.frequency: must be positive for "
                        "prescribed oscillation")

    gn = cfg.gains
    if gn.alpha > 0 or gn.beta > 0 or gn.gamma > 0:
        problems.append("gains: feedback gains must be <= 0")

    o = cfg.output
    if o.snapshot_every < 0:
        problems.append("output.snapshot_every: must be >= 0")
    if o.series_every < 1:
        problems.append("output.series_every: must be >= 1")


def parse_config(text):
    """Parse and validate a JSON config document.

    Raises ConfigError carrying every problem found; a structurally valid
    config with a risky gain combination parses fine but emits a warning
    (second-order time scheme with pure integral forcing is unstable for
    any alpha, so beta or gamma must be engaged).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    if not isinstance(data, dict):
        raise ConfigError(["top level must be a JSON object"])

    problems = []
    kwargs = {}
    for key, raw in data.items():
        if key in ("name",):
            kwargs[key] = str(raw)
        elif key in ("u_ref", "l_ref"):
            try:
                kwargs[key] = float(raw)
            except (TypeError, ValueError):
                problems.append(f"{key}: expected a number")
        elif key in _SECTIONS:
            if not isinstance(raw, dict):
                problems.append(f"{key}: expected a mapping")
            else:
                kwargs[key] = _coerce(_SECTIONS[key], raw, f"{key}.", problems)
        else:
            problems.append(f"{key}: unknown key")

    cfg = RunConfig(**kwargs)
    _validate(cfg, problems)
    if problems:
        raise ConfigError(problems)

    gn = cfg.gains
    if (cfg.time.scheme == "bdf2" and cfg.body.kind != "none"
            and gn.alpha != 0.0 and gn.beta == 0.0 and gn.gamma == 0.0):
        warnings.warn(
            "bdf2 with pure integral forcing (beta = gamma = 0) has an "
            "empty stability region on the alpha axis; set beta or gamma",
            stacklevel=2)
    return cfg


def serialize_config(cfg):
    """JSON text that parses back to an equal config."""
    return json.dumps(asdict(cfg), indent=2, sort_keys=False)


def apply_overrides(text, overrides):
    """Apply dotted-path overrides ("time.dt=0.005") to a JSON document."""
    data = json.loads(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError([f"override {item!r}: expected key=value"])
        path, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = path.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError([f"override {item!r}: {part} is not a section"])
        node[parts[-1]] = value
    return json.dumps(data)
