"""Kernel identities, marker transfer operators and controller semantics."""

import numpy as np
import pytest

from vbflow.forcing import (
    ForcingController,
    LagrangianBoundary,
    circle_markers,
    delta4,
    phi4,
    segment_markers,
)
from vbflow.mesh import GridError, build_stretched_grid, build_uniform_grid


def test_phi4_pointwise_values():
    assert phi4(0.0) == pytest.approx(0.5, abs=1e-15)
    assert phi4(2.0) == 0.0
    assert phi4(-2.0) == 0.0
    assert phi4(3.7) == 0.0
    # continuity across the branch point and the support edge
    assert abs(phi4(1.0 - 1e-12) - phi4(1.0 + 1e-12)) < 1e-9
    assert abs(phi4(2.0 - 1e-12)) < 1e-5


def test_phi4_symmetry_and_positivity():
    r = np.linspace(-2.5, 2.5, 4001)
    w = phi4(r)
    assert np.allclose(w, phi4(-r), atol=0.0)
    assert np.all(w >= 0.0)


def test_phi4_partition_and_moment():
    # discrete partition of unity and vanishing first moment, 1000 offsets
    rng = np.random.default_rng(42)
    x = rng.uniform(-0.5, 0.5, 1000)
    shifts = np.arange(-3, 4)
    w = phi4(x[:, None] - shifts[None, :])
    assert np.abs(w.sum(axis=1) - 1.0).max() <= 1e-12
    moment = (w * (shifts[None, :] - x[:, None])).sum(axis=1)
    assert np.abs(moment).max() <= 1e-12


def test_delta4_normalization():
    h = 0.05
    x = (np.arange(-4, 5) + 0.3) * h
    y = (np.arange(-4, 5) - 0.1) * h
    total = delta4(x[:, None], y[None, :], h).sum() * h * h
    assert total == pytest.approx(1.0, abs=1e-12)


def test_circle_markers_uniform_chords():
    pts, ds = circle_markers((1.0, -2.0), 0.5, 193)
    assert pts.shape == (193, 2)
    chords = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
    assert np.allclose(chords, ds, rtol=1e-12)
    assert ds == pytest.approx(2 * 0.5 * np.sin(np.pi / 193), rel=1e-14)
    radii = np.linalg.norm(pts - np.array([1.0, -2.0]), axis=1)
    assert np.allclose(radii, 0.5, rtol=1e-14)


def test_segment_markers_endpoints():
    pts, ds = segment_markers((0.0, 0.0), (0.0, 3.0), 11)
    assert pts[0] == pytest.approx([0.0, 0.0])
    assert pts[-1] == pytest.approx([0.0, 3.0])
    assert ds == pytest.approx(0.3)


def test_linear_field_interpolated_exactly():
    g = build_uniform_grid((0, 4, 0, 4), 0.05)
    pts, ds = circle_markers((2.0, 2.0), 0.5, 64)
    b = LagrangianBoundary(g, pts, ds)
    x, y = np.meshgrid(g.xc, g.yc, indexing="ij")
    lin = 2.0 * x - 3.0 * y + 0.25
    exact = 2.0 * pts[:, 0] - 3.0 * pts[:, 1] + 0.25
    assert np.abs(b.interpolate(lin) - exact).max() <= 1e-12


def test_vector_interpolation_matches_componentwise():
    g = build_uniform_grid((0, 2, 0, 2), 0.04)
    pts, ds = circle_markers((1.0, 1.0), 0.3, 40)
    b = LagrangianBoundary(g, pts, ds)
    rng = np.random.default_rng(3)
    u = rng.normal(size=(g.nx, g.ny, 2))
    both = b.interpolate(u)
    assert np.allclose(both[:, 0], b.interpolate(u[..., 0]), atol=1e-14)
    assert np.allclose(both[:, 1], b.interpolate(u[..., 1]), atol=1e-14)


def test_spread_conserves_integral():
    g = build_uniform_grid((0, 4, 0, 4), 0.05)
    pts, ds = circle_markers((2.0, 2.0), 0.5, 96)
    b = LagrangianBoundary(g, pts, ds)
    rng = np.random.default_rng(9)
    f = rng.normal(size=96)
    out = np.zeros((g.nx, g.ny))
    b.spread(f, out)
    assert (out * g.volumes).sum() == pytest.approx(
        (f * b.weight_volume).sum(), abs=1e-12)


def test_interpolation_spreading_adjoint():
    # <interp(u), m> over markers equals <u, spread(m)> over cells
    g = build_uniform_grid((0, 4, 0, 4), 0.05)
    pts, ds = circle_markers((1.7, 2.2), 0.4, 57)
    b = LagrangianBoundary(g, pts, ds)
    rng = np.random.default_rng(12)
    u = rng.normal(size=(g.nx, g.ny))
    m = rng.normal(size=57)
    lhs = np.sum(b.interpolate(u) * m) * b.weight_volume
    out = np.zeros_like(u)
    b.spread(m, out)
    # cell volumes are h^2 inside the support, so the duality is exact
    assert lhs == pytest.approx(np.sum(u * out) * b.h**2, rel=1e-12)


def test_boundary_moves_rebuild_stencil():
    g = build_uniform_grid((0, 4, 0, 4), 0.05)
    pts, ds = circle_markers((1.5, 1.5), 0.4, 64)
    b = LagrangianBoundary(g, pts, ds)
    x, y = np.meshgrid(g.xc, g.yc, indexing="ij")
    lin = x + y
    b.move(pts + np.array([0.5, 0.25]))
    moved = pts + np.array([0.5, 0.25])
    assert np.abs(b.interpolate(lin) - (moved[:, 0] + moved[:, 1])).max() <= 1e-12


def test_support_near_domain_edge_raises():
    g = build_uniform_grid((0, 1, 0, 1), 0.05)
    pts, ds = circle_markers((0.06, 0.5), 0.02, 8)
    with pytest.raises(ValueError):
        LagrangianBoundary(g, pts, ds)


def test_body_in_refined_core_of_stretched_grid():
    g = build_stretched_grid((-20, 20, -20, 20), (-2, 2, -2, 2), 4.0 / 246, 1.2)
    pts, ds = circle_markers((0.0, 0.0), 0.5, 193)
    b = LagrangianBoundary(g, pts, ds)
    assert b.h == pytest.approx(4.0 / 246, rel=1e-9)
    assert ds / b.h == pytest.approx(1.0, abs=0.05)


def test_body_straddling_stretch_boundary_raises():
    g = build_stretched_grid((-8, 8, -8, 8), (-1, 1, -1, 1), 0.1, 1.15)
    pts, ds = circle_markers((1.0, 0.0), 0.3, 32)
    with pytest.raises(GridError):
        LagrangianBoundary(g, pts, ds)


def test_controller_sequence_oracle():
    c = ForcingController(alpha=-10.0, beta=-2.0, gamma=-0.5)
    dt = 0.1
    u_b = np.zeros(1)
    # hand-computed: I_1 = 0.1 -> f = -10(0.1) - 2(1) = -3 (no derivative yet)
    f1 = c.force(np.array([1.0]), u_b, dt)
    assert f1[0] == pytest.approx(-3.0, abs=1e-14)
    # I_2 = 0.1 + 0.15 = 0.25; derivative (1.5 - 1)/0.1 = 5
    f2 = c.force(np.array([1.5]), u_b, dt)
    assert f2[0] == pytest.approx(-10 * 0.25 - 2 * 1.5 - 0.5 * 5.0, abs=1e-12)
    # I_3 = 0.25 + 0.05; derivative (0.5 - 1.5)/0.1 = -10
    f3 = c.force(np.array([0.5]), u_b, dt)
    assert f3[0] == pytest.approx(-10 * 0.30 - 2 * 0.5 + 0.5 * 10.0, abs=1e-12)


def test_controller_tracks_moving_body_velocity():
    c = ForcingController(alpha=-1.0, beta=-1.0, gamma=-0.2)
    dt = 0.05
    f1 = c.force(np.array([0.7]), np.array([0.7]), dt)
    assert f1[0] == 0.0
    f2 = c.force(np.array([0.9]), np.array([0.9]), dt)
    assert f2[0] == 0.0  # derivative of the slip, not of the velocity


def test_controller_rejects_positive_gains():
    with pytest.raises(ValueError):
        ForcingController(alpha=1.0, beta=-1.0)
    with pytest.raises(ValueError):
        ForcingController(alpha=-1.0, beta=0.5)
    with pytest.raises(ValueError):
        ForcingController(alpha=-1.0, beta=-1.0, gamma=0.1)


def test_controller_reset():
    c = ForcingController(alpha=-10.0, beta=0.0)
    c.force(np.array([1.0]), np.zeros(1), 0.1)
    c.reset()
    f = c.force(np.array([1.0]), np.zeros(1), 0.1)
    assert f[0] == pytest.approx(-1.0)
