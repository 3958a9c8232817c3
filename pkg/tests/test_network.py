"""Stationarity, faces, Gauss-Bonnet and parity on small networks."""

import json
import math

import numpy as np
import pytest

from geonet.errors import MalformedNetwork, ParityInconsistency
from geonet.geodesics import find_boundary_geodesic_loop, shoot_ambient
from geonet.network import (GeodesicNetwork, check_star_property, check_stationarity, connected_components,
                            density_integrality, extract_faces, gauss_bonnet_audit, parity_decomposition,
                            parity_identity_holds, split_crossings, w2_violations, w3_violations)
from geonet.scenarios import disk_networks


@pytest.fixture(scope="module")
def nets():
    return disk_networks()


@pytest.fixture(scope="module")
def loop_net(revolution):
    loop = find_boundary_geodesic_loop(revolution)
    return GeodesicNetwork(revolution, [(loop.path, 1)]), loop


def test_y_network(nets):
    net = nets["Y-network"]
    assert net.mass == pytest.approx(3.0)
    reports = check_stationarity(net)
    centre = [r for r in reports if not r.on_boundary]
    assert len(centre) == 1
    assert centre[0].density == 1.5
    assert centre[0].residual_norm < 1e-12
    assert centre[0].classification not in ("J_i", "Regular")
    assert all(r.passed for r in reports)
    assert density_integrality(reports) == [reports.index(centre[0])]
    assert w3_violations(net) == []
    faces, _ = extract_faces(net)
    assert len(faces) == 3
    for f in faces:
        assert f.area == pytest.approx(math.pi / 3, abs=1e-6)
        assert gauss_bonnet_audit(net.surface, f) < 1e-9
        assert f.euler_char == 1
    with pytest.raises(ParityInconsistency):
        parity_decomposition(net, faces)


def test_crossed_diameters(nets):
    net = nets["crossed diameters"]
    split = split_crossings(net)
    assert len(split.segments) == 4
    assert split.mass == pytest.approx(net.mass)
    reports = check_stationarity(split)
    kinds = sorted(r.classification for r in reports)
    assert kinds.count("CrossingCandidate") == 1
    faces, split = extract_faces(net)
    assert len(faces) == 4
    assert sum(f.area for f in faces) == pytest.approx(math.pi, abs=1e-6)
    I, J, gamma = parity_decomposition(split, faces)
    assert len(I) == len(J) == 2
    assert parity_identity_holds(faces, I, J, gamma)
    for f in faces:
        ok, _bad = check_star_property(f)
        assert ok


def test_double_diameter_has_even_boundary(nets):
    net = nets["diameter x2"]
    faces, split = extract_faces(net)
    I, J, gamma = parity_decomposition(split, faces)
    assert gamma == []
    # both halves get the same colour: an even segment does not separate the classes
    assert len(I) == 2 and J == []
    assert parity_identity_holds(faces, I, J, gamma)


def test_revolution_loop_faces(loop_net, revolution):
    net, loop = loop_net
    reports = check_stationarity(net)
    (vertex,) = reports
    assert vertex.classification == "J_l"
    assert vertex.residual_norm < 1e-8
    faces, _ = extract_faces(net)
    assert len(faces) == 2
    assert sum(f.area for f in faces) == pytest.approx(revolution.area, rel=1e-6)
    for f in faces:
        assert gauss_bonnet_audit(revolution, f) < 1e-8
    inner = min(faces, key=lambda f: abs(f.kg_integral))
    (corner,) = inner.corners
    assert corner.interior_angle == pytest.approx(math.pi - 2 * loop.angles[0], abs=1e-8)
    # the inner face holds the whole spherical cap: integral of K is 2 pi (1 - cos phi_c)
    assert inner.curvature_integral == pytest.approx(2 * math.pi * revolution.u0 / revolution.rho_c, abs=1e-6)


def test_dangling_end_is_malformed(disk):
    res = shoot_ambient(disk, np.array([0.2, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]), 5.0)
    net = GeodesicNetwork(disk, [(res.path, 1)])
    with pytest.raises(MalformedNetwork):
        check_stationarity(net)


@pytest.mark.parametrize("m", [0, -1, 1.5])
def test_bad_multiplicity(disk, nets, m):
    path = nets["diameter"].segments[0][0]
    with pytest.raises(MalformedNetwork):
        GeodesicNetwork(disk, [(path, m)])


def test_unbalanced_star_fails_stationarity(disk):
    dirs = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (-1.0, 0.0, 0.0)]
    net = GeodesicNetwork.radial(disk, np.zeros(3), dirs)
    reports = check_stationarity(net)
    centre = [r for r in reports if not r.on_boundary][0]
    assert centre.residual_norm == pytest.approx(1.0, abs=1e-12)
    assert not centre.passed
    # two consecutive segments at angle pi
    assert w2_violations(reports) != []


def test_components_and_json(nets, disk):
    net = nets["crossed diameters"]
    assert connected_components(net) == 2
    assert connected_components(split_crossings(net)) == 1
    again = GeodesicNetwork.from_json(disk, json.loads(json.dumps(net.to_json())))
    assert again.mass == pytest.approx(net.mass, abs=1e-9)
    assert [m for _p, m in again.segments] == [m for _p, m in net.segments]


def test_face_json(nets):
    faces, _ = extract_faces(nets["Y-network"])
    d = json.loads(json.dumps(faces[0].to_json()))
    assert d["euler_char"] == 1
    assert len(d["corners"]) == 3
