"""Stability analysis of the discrete feedback-forcing recurrence.

The forced velocity at a boundary marker obeys a scalar linear recurrence
once the forcing sum is folded in; its characteristic polynomial (cubic in
the amplification factor r) depends only on the scaled gains

    alpha* = C_max * alpha * dt**2
    beta*  = C_max * beta  * dt
    gamma* = C_max * gamma

where C_max is the largest value the discrete kernel product attains on the
grid (1/2 in 2D for the 4-point kernel). Everything here works on those
scaled gains or, for plotting and reporting, on the unstarred axis variables
x = -alpha*dt**2 and y = -beta*dt.

Verdicts follow the root layout of the characteristic polynomial: "stable"
when every root has |r| < 1, "marginal" when the largest magnitude equals 1
within tolerance, "unstable" otherwise. Region membership (sweeps, boundary
curves) counts stable-or-marginal as inside, i.e. the closed region |r| <= 1:
with beta* = 0 the integral-only controller is an undamped oscillator whose
roots sit exactly on the unit circle, and the classical region plots include
that axis.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "C_MAX_2D",
    "ScaledGains",
    "scale_gains",
    "char_poly_bdf1",
    "char_poly_bdf2",
    "jury_stable",
    "root_magnitude_verdict",
    "HalfPlane",
    "analytic_region",
    "numeric_region",
    "boundary_polyline",
    "max_alpha_curve",
    "timestep_ratio_bdf2_vs_bdf1",
]

C_MAX_2D = 0.5

_SCHEMES = ("bdf1", "bdf2")

# admissible gamma* intervals (necessary |a3| < a0 Jury condition)
_GAMMA_STAR_RANGE = {"bdf1": (-1.0, 1.0), "bdf2": (-2.0, 1.0)}


@dataclass(frozen=True)
class ScaledGains:
    """Dimensionless controller gains entering the recurrence."""

    alpha_star: float
    beta_star: float
    gamma_star: float


def scale_gains(alpha, beta, gamma, dt, c_max=C_MAX_2D):
    """Scale physical PID gains to the dimensionless recurrence gains."""
    return ScaledGains(c_max * alpha * dt**2, c_max * beta * dt, c_max * gamma)


def char_poly_bdf1(gains):
    """Coefficients (descending powers) of the BDF1 characteristic cubic.

    r**3 - (2 + a* + b* + g*) r**2 + (1 + b* + 2 g*) r - g*
    """
    a, b, g = gains.alpha_star, gains.beta_star, gains.gamma_star
    return np.array([1.0, -(2.0 + a + b + g), 1.0 + b + 2.0 * g, -g])


def char_poly_bdf2(gains):
    """Coefficients (descending powers) of the BDF2 characteristic cubic.

    3 r**3 - (7 + 2a* + 2b* + 2g*) r**2 + (5 + 2b* + 4g*) r - (1 + 2g*)
    """
    a, b, g = gains.alpha_star, gains.beta_star, gains.gamma_star
    return np.array(
        [3.0, -(7.0 + 2.0 * a + 2.0 * b + 2.0 * g), 5.0 + 2.0 * b + 4.0 * g, -(1.0 + 2.0 * g)]
    )


_CHAR_POLY = {"bdf1": char_poly_bdf1, "bdf2": char_poly_bdf2}


# ----------------------------------------------------------------------
# Jury test
# ----------------------------------------------------------------------

def _jury_margins(coeffs):
    """Signed margins of the Jury conditions with per-condition scales.

    Each margin is positive inside the open stability region and zero on its
    boundary. Returns (margins, scales).
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size not in (3, 4):
        raise ValueError("jury test implemented for degree 2 and 3 only")
    if c[0] == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    if c[0] < 0:
        c = -c
    s1 = max(1.0, np.abs(c).sum())
    if c.size == 3:
        a0, a1, a2 = c
        margins = np.array([a0 + a1 + a2, a0 - a1 + a2, a0 - abs(a2)])
        scales = np.array([s1, s1, s1])
    else:
        a0, a1, a2, a3 = c
        p1 = a0 + a1 + a2 + a3          # P(1)
        pm1 = -(-a0 + a1 - a2 + a3)     # (-1)^3 P(-1)
        c3 = a0 - abs(a3)
        b2 = a3 * a3 - a0 * a0
        b0 = a3 * a1 - a0 * a2
        c4 = abs(b2) - abs(b0)
        s2 = max(1.0, (np.abs(c).max()) ** 2)
        margins = np.array([p1, pm1, c3, c4])
        scales = np.array([s1, s1, s1, s2])
    return margins, scales


def jury_stable(coeffs, tol=1e-10):
    """Jury-table verdict for a degree-2 or degree-3 real polynomial.

    Returns "stable" (all roots strictly inside the unit circle),
    "unstable", or "marginal" when the point sits on the region boundary
    within ``tol`` (relative to the coefficient scale).
    """
    margins, scales = _jury_margins(coeffs)
    rel = margins / scales
    if np.all(rel > tol):
        return "stable"
    if np.any(rel < -tol):
        return "unstable"
    return "marginal"


def root_magnitude_verdict(coeffs, tol=1e-10):
    """Direct root-magnitude verdict (companion-matrix oracle)."""
    r = np.abs(np.roots(np.asarray(coeffs, dtype=float)))
    m = r.max() if r.size else 0.0
    if m < 1.0 - tol:
        return "stable"
    if m > 1.0 + tol:
        return "unstable"
    return "marginal"


def _verdict(scheme, gains, tol=1e-10):
    return jury_stable(_CHAR_POLY[scheme](gains), tol)


def _inside(scheme, gains, tol=1e-10):
    """Closed-region membership: stable or marginal."""
    return _verdict(scheme, gains, tol) != "unstable"


# ----------------------------------------------------------------------
# analytic regions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPlane:
    """Constraint cx * x + cy * y <= bound on x = -alpha dt^2, y = -beta dt."""

    cx: float
    cy: float
    bound: float

    def contains(self, x, y, tol=0.0):
        return self.cx * x + self.cy * y <= self.bound + tol


@dataclass(frozen=True)
class StabilityRegion:
    scheme: str
    gamma: float
    constraints: tuple
    label: str  # "analytic" or "numeric"

    def contains(self, x, y, tol=0.0):
        return all(hp.contains(x, y, tol) for hp in self.constraints)


def analytic_region(scheme, gamma, c_max=C_MAX_2D):
    """Closed-form stability region in the (x, y) = (-alpha dt^2, -beta dt)
    quarter-plane for a given physical derivative gain gamma (<= 0).

    The half-plane families come from the Jury conditions of the
    characteristic cubics:

    * BDF1: x + 2y <= 8 + 4*gamma  (root-at-minus-one condition); the region
      shape does not otherwise depend on gamma.
    * BDF2: x + 2y <= 16 + 4*gamma, plus the inferior cut
      (1 + gamma) x - (2 - gamma) y <= 0 which is active only while
      -gamma < 1 (it degenerates into the x >= 0 axis at -gamma = 1 and is
      vacuous beyond).

    Requires gamma inside the admissible window (|C_max*gamma| bounds from
    the |a3| < a0 condition), else raises ValueError with the verdict
    "unconditionally unstable".
    """
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    g_star = c_max * gamma
    lo, hi = _GAMMA_STAR_RANGE[scheme]
    if not (lo <= g_star <= hi):
        raise ValueError(
            f"gamma* = {g_star:g} outside [{lo:g}, {hi:g}] for {scheme}: "
            "unconditionally unstable"
        )
    # with c_max = 1/2 these evaluate to the classical printed lines
    if scheme == "bdf1":
        cons = (HalfPlane(1.0, 2.0, 4.0 * (1.0 + g_star) / c_max),)
    else:
        cons = [HalfPlane(1.0, 2.0, (8.0 + 4.0 * g_star) / c_max)]
        if g_star > -0.5:
            cons.append(HalfPlane(1.0 + 2.0 * g_star, -2.0 * (1.0 - g_star), 0.0))
        cons = tuple(cons)
    return StabilityRegion(scheme, gamma, cons, "analytic")


# ----------------------------------------------------------------------
# numeric regions
# ----------------------------------------------------------------------

def numeric_region(scheme, gamma, dt=1.0, x_max=20.0, y_max=10.0, n=400,
                   c_max=C_MAX_2D, tol=1e-8):
    """Jury-sweep verdict grid over the (x, y) plane.

    Returns (x_nodes, y_nodes, verdicts) where verdicts is an (n, n) array of
    strings. dt only matters through the scaled gains and defaults to 1 so x
    and y are read directly as -alpha dt^2 and -beta dt.
    """
    xs = np.linspace(0.0, x_max, n)
    ys = np.linspace(0.0, y_max, n)
    verdicts = np.empty((n, n), dtype=object)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            g = ScaledGains(-c_max * x, -c_max * y, c_max * gamma)
            verdicts[i, j] = _verdict(scheme, g, tol)
    return xs, ys, verdicts


def _bisect_boundary(member, lo, hi, tol=1e-6, max_iter=200):
    """Largest t in [lo, hi] with member(t) true, assuming member(lo)."""
    if member(hi):
        return hi
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo


def boundary_polyline(scheme, gamma, y_values, x_max=40.0, c_max=C_MAX_2D,
                      tol=1e-6, jury_tol=1e-8):
    """Numeric region boundary: max stable x for each y (bisection to tol)."""
    xs = np.empty(len(y_values))
    for k, y in enumerate(y_values):
        def member(x, _y=y):
            g = ScaledGains(-c_max * x, -c_max * _y, c_max * gamma)
            return _inside(scheme, g, jury_tol)

        xs[k] = _bisect_boundary(member, 0.0, x_max, tol) if member(0.0) else np.nan
    return xs


def max_alpha_curve(scheme, gammas, c_max=C_MAX_2D, tol=1e-6, x_max=40.0,
                    jury_tol=1e-8):
    """Largest -alpha*dt^2 with beta = 0 for each gamma (bisection to tol).

    Gammas outside the admissible window yield 0.0 entries (no stable
    forcing at all: unconditionally unstable).
    """
    out = np.empty(len(gammas))
    lo_g, hi_g = _GAMMA_STAR_RANGE[scheme]
    for k, gamma in enumerate(gammas):
        g_star = c_max * gamma
        if not (lo_g - 1e-15 <= g_star <= hi_g + 1e-15):
            out[k] = 0.0
            continue

        def member(x, _g=gamma):
            g = ScaledGains(-c_max * x, 0.0, c_max * _g)
            return _inside(scheme, g, jury_tol)

        out[k] = _bisect_boundary(member, 0.0, x_max, tol) if member(0.0) else 0.0
    return out


def timestep_ratio_bdf2_vs_bdf1():
    """Reference ratio of the largest usable time steps at beta = 0 for a
    given alpha: BDF2 with derivative gain -gamma = 2 versus BDF1 with
    gamma = 0, from the classical flow-measured marginal intercepts 14 and
    11 (sqrt(14/11) ~ 1.13).

    This is a reported reference constant; the benchmark harness measures
    its own numeric ratio on the coarse stability map and reports the two
    separately.
    """
    return float(np.sqrt(14.0 / 11.0))
