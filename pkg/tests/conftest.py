import math

import pytest

import geonet.surfaces as sf

REVOLUTION = {"kind": "SurfaceOfRevolution", "params": {"cap_radius": 1.0, "slope": 0.2, "boundary_radius": 1.5}}


@pytest.fixture(scope="session")
def disk():
    return sf.FlatConvexDomain.disk()


@pytest.fixture(scope="session")
def cap():
    return sf.SphericalCap(1.0, math.pi / 3)


@pytest.fixture(scope="session")
def revolution():
    return sf.from_json(REVOLUTION)


@pytest.fixture(scope="session")
def triangle():
    return sf.FlatConvexDomain.equilateral(1.0, 0.05)


@pytest.fixture(scope="session")
def sector():
    return sf.FlatConvexDomain.sector(2 * math.pi / 5)


@pytest.fixture(scope="session", params=["disk", "triangle", "cap", "revolution"])
def catalog(request):
    return request.getfixturevalue(request.param)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
