"""Shortening map: monotonicity, fixed points, collapse and homotopies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import geonet.surfaces as sf
from geonet.birkhoff import (BrokenGeodesic, choose_segment_count, frame_violations, geodesic_residual,
                             homotopy_extract, project_to_lambda, self_intersections, shorten_run,
                             shorten_step)
from geonet.errors import NotCollapsed, SegmentTooLong
from geonet.scenarios import random_broken_geodesic


def test_diameter_is_fixed(disk):
    sigma = project_to_lambda(disk, [(-1.0, 0.0), (1.0, 0.0)], 4)
    new, dec = shorten_step(disk, sigma)
    assert abs(new.total_length - 2.0) < 1e-12
    assert dec < 1e-12
    assert geodesic_residual(disk, sigma) < 1e-12
    out = shorten_run(disk, sigma)
    assert out.kind == "FixedFreeBoundaryGeodesic"


def test_off_center_chord_collapses(disk):
    c = math.sqrt(0.75)
    sigma = project_to_lambda(disk, [(0.5, -c), (0.5, c)], 4)
    out = shorten_run(disk, sigma)
    assert out.kind == "Collapsed"
    # it slides to the nearer side of the disk
    assert out.collapse_point[0] > 0.9
    assert np.all(np.diff(out.lengths) <= 0)


def test_closed_polygon_collapses(disk):
    n = 32
    pts = [(0.5 * math.cos(2 * math.pi * k / n), 0.5 * math.sin(2 * math.pi * k / n)) for k in range(n)]
    sigma = project_to_lambda(disk, pts, 16, closed=True, endpoints_on_boundary=False)
    assert sigma.total_length == pytest.approx(n * math.sin(math.pi / n), abs=1e-12)
    out = shorten_run(disk, sigma)
    assert out.kind == "Collapsed"
    assert np.all(np.diff(out.lengths) <= 1e-12)


def test_latitude_on_near_hemisphere_collapses():
    H = sf.SphericalCap(1.0, 0.49 * math.pi)
    n = 16
    pts = [H.embed((0.45 * math.pi, 2 * math.pi * k / n)) for k in range(n)]
    sigma = project_to_lambda(H, pts, 8, closed=True, endpoints_on_boundary=False, chart=False)
    out = shorten_run(H, sigma)
    # a latitude below the equator shrinks over the pole
    assert out.kind == "Collapsed"


def test_segment_count_rule(disk, cap):
    assert choose_segment_count(disk, 2.0) % 2 == 0
    for S, length in ((disk, 2.0), (cap, 2.0)):
        L = choose_segment_count(S, length) // 2
        assert length / (2 * L) <= S.epsilon()


def test_too_few_segments(disk):
    with pytest.raises(SegmentTooLong):
        project_to_lambda(disk, [(-1.0, 0.0), (1.0, 0.0)], 1)


def test_step_needs_four_segments(disk):
    sigma = project_to_lambda(disk, [(-0.5, -math.sqrt(0.75)), (0.5, -math.sqrt(0.75))], 1)
    with pytest.raises(ValueError):
        shorten_step(disk, sigma)


def test_open_polyline_must_touch_boundary(disk):
    with pytest.raises(ValueError):
        project_to_lambda(disk, [(0.0, 0.0), (1.0, 0.0)], 2)


def test_homotopy_refuses_fixed_outcome(disk):
    sigma = project_to_lambda(disk, [(-1.0, 0.0), (1.0, 0.0)], 4)
    with pytest.raises(NotCollapsed):
        homotopy_extract(disk, shorten_run(disk, sigma))


@pytest.mark.parametrize("seed", range(4))
def test_random_runs(catalog, seed):
    rng = np.random.default_rng(seed)
    sigma = random_broken_geodesic(catalog, rng)
    out = shorten_run(catalog, sigma)
    assert out.worst_raw_increase <= 1e-12
    assert np.all(np.diff(out.lengths) <= 1e-12)
    if out.kind == "Collapsed":
        fam = homotopy_extract(catalog, out, 64)
        assert fam.max_mass <= out.lengths[0] + 1e-9
        assert fam.frames[-1][1].mass == 0.0
        ts = [t for t, _c in fam.frames]
        assert ts[0] == 0.0 and ts[-1] == 1.0 and np.all(np.diff(ts) > 0)
    elif out.kind.startswith("Fixed"):
        assert geodesic_residual(catalog, out.trajectory[-1]) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.lists(st.tuples(st.floats(-0.7, 0.7),
                                                                                  st.floats(-0.7, 0.7)),
                                                                        max_size=3))
def test_disk_step_never_lengthens(disk, a, b, inner):
    pts = [(math.cos(a), math.sin(a))] + inner + [(math.cos(b), math.sin(b))]
    length = sum(math.dist(p, q) for p, q in zip(pts[:-1], pts[1:]))
    if length < 1e-6:
        return
    L = max(2, choose_segment_count(disk, length) // 2)
    sigma = project_to_lambda(disk, pts, L)
    for _ in range(5):
        new, dec = shorten_step(disk, sigma)
        assert new.total_length <= sigma.total_length + 1e-12
        assert dec >= 0
        sigma = new


def test_broken_geodesic_properties(disk):
    sigma = project_to_lambda(disk, [(0.0, -1.0), (0.3, 0.0), (0.0, 1.0)], 3)
    assert isinstance(sigma, BrokenGeodesic)
    assert sigma.n_segments == 6
    assert np.allclose(sigma.seg_lengths, sigma.seg_lengths[0])
    assert sigma.total_length == pytest.approx(2 * math.hypot(0.3, 1.0), abs=1e-12)


def test_embedded_curve_stays_embedded(disk):
    c = math.sqrt(0.75)
    sigma = project_to_lambda(disk, [(-0.5, -c), (0.0, 0.2), (0.5, -c)], 4)
    out = shorten_run(disk, sigma)
    assert self_intersections(disk, sigma) == 0
    assert frame_violations(disk, out) == []
