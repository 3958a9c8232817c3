"""Geodesic integration, connection, free boundary geodesics and loops."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geonet.errors import PointOutsideDomain
from geonet.geodesics import (connect, connect_ambient, curvature_integral, drop_ambient, drop_to_boundary,
                              find_boundary_geodesic_loop, find_free_boundary_geodesic,
                              free_boundary_residuals, path_from_samples, second_variation_normal, shoot)
from geonet.scenarios import meridian_length_quadrature, unrolled_cone_loop


def _cap_point(cap, a, b):
    return cap.embed((0.95 * cap.phi1 * a, 2 * math.pi * b))


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_cap_connect_is_great_circle(cap, a, b, c, d):
    x, y = _cap_point(cap, a, b), _cap_point(cap, c, d)
    _v, length = connect_ambient(cap, x, y)
    oracle = cap.R * math.atan2(np.linalg.norm(np.cross(x, y)), x @ y)
    assert length == pytest.approx(oracle, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_disk_connect_is_chord(disk, a, b, c, d):
    p = 0.9 * a * np.array([math.cos(6.3 * b), math.sin(6.3 * b)])
    q = 0.9 * c * np.array([math.cos(6.3 * d), math.sin(6.3 * d)])
    path = connect(disk, p, q)
    assert path.length == pytest.approx(np.linalg.norm(p - q), abs=1e-12)


def test_revolution_clairaut_invariant(revolution):
    """Angular momentum about the axis is constant along every geodesic."""
    x = revolution.embed((0.3, 0.4))
    v = revolution.to_tangent(x, revolution.vector_from_chart((0.3, 0.4), (1.0, 0.9)))
    v = v / np.linalg.norm(v)
    ts = np.linspace(0, revolution.exit_time(x, v, 20.0) * 0.999, 200)
    P, V = revolution.flow_samples(x, v, ts)
    P, V = np.asarray(P), np.asarray(V)
    mom = P[:, 1] * V[:, 2] - P[:, 2] * V[:, 1]
    assert np.ptp(mom) < 1e-10
    assert np.allclose(np.linalg.norm(V, axis=1), 1.0, atol=1e-10)
    # stays on the surface
    assert max(abs(np.hypot(p[1], p[2]) - revolution.r(p[0])) for p in P) < 1e-10


def test_revolution_connect_symmetric(revolution):
    x, y = revolution.embed((2.0, 0.1)), revolution.embed((1.0, 2.0))
    assert connect_ambient(revolution, x, y)[1] == pytest.approx(connect_ambient(revolution, y, x)[1], abs=1e-9)
    # the triangle inequality through the apex
    apex = revolution.embed((0.0, 0.0))
    via = connect_ambient(revolution, x, apex)[1] + connect_ambient(revolution, apex, y)[1]
    assert connect_ambient(revolution, x, y)[1] <= via + 1e-9


def test_shoot_reports_exit(disk):
    res = shoot(disk, (0.0, 0.0), (1.0, 0.0), 5.0)
    assert res.hit_boundary
    assert res.path.length == pytest.approx(1.0, abs=1e-12)
    assert res.exit[0] == "HitBoundary"
    short = shoot(disk, (0.0, 0.0), (1.0, 0.0), 0.5)
    assert short.exit == ("ReachedLength",)
    assert short.path.length == pytest.approx(0.5)


def test_shoot_outside_raises(disk):
    with pytest.raises(PointOutsideDomain):
        shoot(disk, (2.0, 0.0), (1.0, 0.0), 1.0)


def test_drop_disk_and_cap(disk, cap):
    path = drop_to_boundary(disk, (0.3, 0.4))
    assert path.length == pytest.approx(0.5, abs=1e-12)
    s, _v, d = drop_ambient(cap, cap.embed((0.4, 1.0)))
    assert d == pytest.approx(cap.R * (cap.phi1 - 0.4), abs=1e-10)
    assert s == pytest.approx(1.0 * cap.R * math.sin(cap.phi1), abs=1e-8)


def test_fbg_disk_is_diameter(disk):
    path = find_free_boundary_geodesic(disk, (0.3, math.pi / 2 + 0.2))
    assert path.length == pytest.approx(2.0, abs=1e-9)
    assert max(free_boundary_residuals(disk, path)) < 1e-9


def test_fbg_cap_is_meridian(cap):
    path = find_free_boundary_geodesic(cap)
    assert path.length == pytest.approx(2 * cap.phi1 * cap.R, abs=1e-9)


def test_fbg_revolution_meridian_matches_quadrature(revolution):
    path = find_free_boundary_geodesic(revolution)
    assert path.length == pytest.approx(meridian_length_quadrature(revolution), abs=1e-8)


def test_fbg_triangle_altitude(triangle):
    # launched from the middle of a side, the altitude meets the far corner arc head on
    path = find_free_boundary_geodesic(triangle, (0.5 * triangle.pieces[0].length, math.pi / 2))
    side = math.sqrt(4 / math.sqrt(3))
    # the rounded shape is the core triangle offset by rho, scaled to unit area
    assert max(free_boundary_residuals(triangle, path)) < 1e-9
    assert path.length < side * math.sqrt(3) / 2 + 2 * 0.05


def test_loop_on_revolution_matches_developed_cone(revolution):
    loop = find_boundary_geodesic_loop(revolution)
    length, _half_angle, clear = unrolled_cone_loop(revolution)
    assert clear
    assert abs(loop.angles[0] - loop.angles[1]) < 1e-9
    assert loop.path.length == pytest.approx(length, abs=1e-8)
    assert loop.closure_gap < 1e-9


@pytest.mark.parametrize("seed_s", [0.0, 1.3, 4.0])
def test_loop_rotation_invariant(revolution, seed_s):
    loop = find_boundary_geodesic_loop(revolution, seed_s)
    assert loop.path.length == pytest.approx(unrolled_cone_loop(revolution)[0], abs=1e-8)


def test_second_variation_disk(disk):
    d = find_free_boundary_geodesic(disk)
    assert second_variation_normal(disk, d) == pytest.approx(-2.0, abs=1e-10)


def test_second_variation_cap_matches_equidistant_family(cap):
    """Lengths of curves at constant distance from the meridian, clipped to the cap."""
    phi1 = cap.phi1

    def L(t):
        return 2 * math.cos(t) * math.acos(math.cos(phi1) / math.cos(t))

    h = 1e-3
    fd = (L(h) - 2 * L(0) + L(-h)) / h ** 2
    d = find_free_boundary_geodesic(cap)
    assert second_variation_normal(cap, d) == pytest.approx(fd, abs=1e-5)


def test_curvature_integral(cap, revolution):
    d = find_free_boundary_geodesic(cap)
    assert curvature_integral(cap, d) == pytest.approx(d.length, abs=1e-9)
    m = find_free_boundary_geodesic(revolution)
    # the meridian crosses the spherical cap along a great arc of angle 2*phi_c
    phi_c = math.acos(1 - revolution.u0 / revolution.rho_c)
    assert curvature_integral(revolution, m) == pytest.approx(2 * phi_c / revolution.rho_c, abs=1e-6)


def test_path_from_samples_round_trip(revolution):
    p = connect(revolution, (1.0, 0.2), (2.5, 1.4))
    q = path_from_samples(revolution, p.samples)
    assert q.length == pytest.approx(p.length, abs=1e-9)
    assert np.allclose(q.points[-1], p.points[-1], atol=1e-9)
