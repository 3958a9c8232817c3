"""Surface geometry against finite-difference and closed-form oracles."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import geonet.surfaces as sf
from geonet.errors import ConfigInvalid


def _interior_chart(S, a, b):
    """Map (a, b) in [0, 1]^2 to chart coordinates well inside S."""
    if isinstance(S, sf.SphericalCap):
        return np.array([0.05 + 0.9 * a * S.phi1, 2 * math.pi * b])
    if isinstance(S, sf.SurfaceOfRevolution):
        return np.array([0.05 + 0.9 * a * S.u1, 2 * math.pi * b])
    c = np.mean([S.boundary_point(s)[0][:2] for s in np.linspace(0, S.boundary_length, 60, endpoint=False)], 0)
    r = 0.3 * a
    return c + np.array([r * math.cos(2 * math.pi * b), r * math.sin(2 * math.pi * b)])


def _fd_metric(S, p, h=1e-6):
    J = np.column_stack([(S.embed(p + h * e) - S.embed(p - h * e)) / (2 * h) for e in np.eye(2)])
    return J.T @ J


def _fd_christoffel(S, p, h=1e-5):
    dg = np.array([(S.metric_at(p + h * e) - S.metric_at(p - h * e)) / (2 * h) for e in np.eye(2)])
    gi = np.linalg.inv(S.metric_at(p))
    G = np.zeros((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                G[k, i, j] = 0.5 * sum(gi[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j]) for l in range(2))
    return G


def _brioschi_orthogonal(S, p, h=1e-4):
    """K for an orthogonal metric E du^2 + G dv^2, from metric values only."""
    def part(q, idx, comp):
        e = np.eye(2)[idx]
        gp, gm = S.metric_at(q + h * e), S.metric_at(q - h * e)
        return (gp[comp, comp] - gm[comp, comp]) / (2 * h)

    def fa(q):
        g = S.metric_at(q)
        return part(q, 1, 0) / math.sqrt(g[0, 0] * g[1, 1])

    def fb(q):
        g = S.metric_at(q)
        return part(q, 0, 1) / math.sqrt(g[0, 0] * g[1, 1])

    g = S.metric_at(p)
    e0, e1 = np.eye(2)
    d = (fa(p + h * e1) - fa(p - h * e1)) / (2 * h) + (fb(p + h * e0) - fb(p - h * e0)) / (2 * h)
    return -d / (2 * math.sqrt(g[0, 0] * g[1, 1]))


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_metric_matches_embedding_jacobian(catalog, a, b):
    p = _interior_chart(catalog, a, b)
    assert np.allclose(catalog.metric_at(p), _fd_metric(catalog, p), atol=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_christoffel_matches_metric_derivatives(catalog, a, b):
    p = _interior_chart(catalog, a, b)
    assert np.allclose(catalog.christoffel_at(p), _fd_christoffel(catalog, p), atol=1e-6)


@pytest.mark.parametrize("u", [0.2, 0.5, 0.79, 0.82, 1.5, 3.0])
def test_revolution_curvature_brioschi(revolution, u):
    p = np.array([u, 0.7])
    # the profile is only C^1 at the junction: skip points whose stencil straddles it
    if abs(u - revolution.u0) < 1e-3:
        pytest.skip("stencil straddles the profile junction")
    assert revolution.gauss_curvature_at(p) == pytest.approx(_brioschi_orthogonal(revolution, p), abs=1e-5)


def test_cap_curvature_is_constant(cap):
    for p in [(0.1, 0.0), (0.5, 2.0), (1.0, 4.0)]:
        assert cap.gauss_curvature_at(p) == pytest.approx(_brioschi_orthogonal(cap, np.array(p)), abs=1e-5)


def test_flat_is_flat(disk):
    assert disk.gauss_curvature_at((0.2, 0.1)) == 0.0
    assert np.allclose(disk.christoffel_at((0.2, 0.1)), 0.0)


@pytest.mark.parametrize("k", range(7))
def test_boundary_frame(catalog, k):
    s = catalog.boundary_length * k / 7
    x, t, nu, _kg = catalog.boundary_point(s)
    assert abs(catalog.boundary_fn(x)) < 1e-10
    assert np.linalg.norm(t) == pytest.approx(1.0)
    assert abs(t @ nu) < 1e-12
    # the inward normal points into the domain
    assert catalog.boundary_fn(x + 1e-4 * nu) > 0
    h = 1e-6
    fd = (catalog.boundary_point(s + h)[0] - catalog.boundary_point(s - h)[0]) / (2 * h)
    # central differences lose accuracy h*kg/2 where a piece of curvature kg meets a straight side
    assert np.allclose(fd, t, atol=1e-6 * (1 + catalog.boundary_kg_max()))


def test_gauss_bonnet_whole_surface(catalog):
    """Integral of K over the surface plus total boundary geodesic curvature is 2 pi."""
    S = catalog
    kg = S.kg_integral(0.0, S.boundary_length)
    if isinstance(S, sf.FlatConvexDomain):
        total = kg
    elif isinstance(S, sf.SphericalCap):
        total = S.area / S.R ** 2 + kg
    else:
        # K integrates only over the spherical part
        total = 2 * math.pi * S.u0 / S.rho_c + kg
    assert total == pytest.approx(2 * math.pi, abs=1e-6)


def test_closed_form_sizes(disk, cap, sector):
    assert disk.area == pytest.approx(math.pi)
    assert disk.boundary_length == pytest.approx(2 * math.pi)
    assert cap.boundary_length == pytest.approx(2 * math.pi * math.sin(math.pi / 3))
    assert cap.area == pytest.approx(2 * math.pi * (1 - math.cos(math.pi / 3)))
    assert sector.area == pytest.approx(math.pi / 5)
    assert sector.boundary_length == pytest.approx(2 + 2 * math.pi / 5)


def test_revolution_profile(revolution):
    R = revolution
    assert R.r(R.u1) == pytest.approx(1.5, abs=1e-12)
    # C^1 blend at the junction
    assert R.r(R.u0 - 1e-9) == pytest.approx(R.r(R.u0 + 1e-9), abs=1e-8)
    assert R.dr(R.u0 - 1e-9) == pytest.approx(R.dr(R.u0 + 1e-9), abs=1e-6)
    assert R.dr(2.0) == pytest.approx(0.2)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_chart_round_trip(catalog, a, b):
    p = _interior_chart(catalog, a, b)
    q = catalog.chart(catalog.embed(p))
    if not isinstance(catalog, sf.FlatConvexDomain):
        assert q[0] == pytest.approx(p[0], abs=1e-10)
        assert (q[1] - p[1] + math.pi) % (2 * math.pi) - math.pi == pytest.approx(0.0, abs=1e-9)
    else:
        assert np.allclose(q, p)


@pytest.mark.parametrize("k", range(5))
def test_project_to_boundary_recovers_s(catalog, k):
    s = catalog.boundary_length * (k + 0.3) / 5
    x = catalog.boundary_point(s)[0]
    s2, d = catalog.project_to_boundary(x)
    assert abs(d) < 1e-9
    assert np.allclose(catalog.boundary_point(s2)[0], x, atol=1e-8)


def test_json_round_trip(catalog):
    d = catalog.to_json()
    again = sf.from_json(json.loads(json.dumps(d)))
    assert again.to_json() == d
    assert again.boundary_length == pytest.approx(catalog.boundary_length)


@pytest.mark.parametrize("desc", [{"kind": "Torus"}, {"kind": "FlatConvexDomain", "params": {"shape": "blob"}},
                                  "disk", {"params": {}}])
def test_bad_descriptors(desc):
    with pytest.raises(ConfigInvalid):
        sf.from_json(desc)


def test_convexity_report(disk, triangle):
    assert sf.convexity_report(disk)["strict"]
    rep = sf.convexity_report(triangle)
    assert rep["sharp_corners"] == 0
