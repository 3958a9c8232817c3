"""SVG output: structure and byte determinism."""

import math
import xml.etree.ElementTree as ET

import pytest

from geonet.birkhoff import project_to_lambda, shorten_run
from geonet.cycles import Sweepout
from geonet.errors import IoFailure
from geonet.render import render_svg, svg_text
from geonet.scenarios import disk_networks
from geonet.sweepout import parallel_sweepout

NS = "{http://www.w3.org/2000/svg}"


def test_sweepout_svg(sector, tmp_path):
    sw = parallel_sweepout(sector, (1.0, 0.0), 32)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(sw, p1, sector)
    render_svg(parallel_sweepout(sector, (1.0, 0.0), 32), p2, sector)
    assert p1.read_bytes() == p2.read_bytes()
    root = ET.parse(p1).getroot()
    lines = root.findall(f"{NS}polyline")
    dots = root.findall(f"{NS}circle")
    assert len(lines) + len(dots) == len(sw.frames)
    opac = [float(e.get("stroke-opacity")) for e in lines]
    assert opac == sorted(opac)
    assert 0.15 <= opac[0] and opac[-1] <= 1.0


def test_empty_sweepout_draws_boundary_only(disk):
    root = ET.fromstring(svg_text(Sweepout([]), disk))
    assert len(root.findall(f"{NS}polygon")) == 1
    assert not root.findall(f"{NS}polyline")


def test_network_and_trajectory(disk):
    root = ET.fromstring(svg_text(disk_networks()["Y-network"]))
    assert len(root.findall(f"{NS}polyline")) == 3
    c = math.sqrt(0.75)
    out = shorten_run(disk, project_to_lambda(disk, [(0.5, -c), (0.5, c)], 4))
    root = ET.fromstring(svg_text(out, disk))
    assert len(root.findall(f"{NS}polyline")) == len(out.trajectory)


def test_unwritable_path(disk, tmp_path):
    with pytest.raises(IoFailure):
        render_svg(Sweepout([]), tmp_path / "missing" / "x.svg", disk)


def test_unknown_object(disk):
    with pytest.raises(TypeError):
        svg_text(object(), disk)
