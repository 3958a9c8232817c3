"""Exit criteria: each registered scenario at its stated tolerance and runtime limit."""

import time

import pytest

from conftest import ACCEPTANCE
from geonet.scenarios import ScenarioConfig, run_scenario

CRITERIA = [
    (1, "disk_widths", 5),
    (2, "second_variation", 1),
    (3, "sector_ls", 10),
    (4, "triangle_height", 60),
    (5, "boundary_inequality", 10),
    (6, "revolution_loop", 60),
    (7, "shortening_properties", 120),
    (8, "network_audits", 30),
]

# rows each criterion must contain, matched by prefix
REQUIRED = {
    "disk_widths": ["free boundary geodesic length", "parallel sweepout max mass", "diameter length change"],
    "second_variation": ["second variation formula", "finite-difference"],
    "sector_ls": ["edge-perpendicular sweepout", "Lusternik-Schnirelmann sum", "sum exceeds"],
    "triangle_height": ["extrapolated min-max chord", "perturbed triangle"],
    "boundary_inequality": ["inscribed polygon bound on the disk", "disk bound below", "cap bound below"],
    "revolution_loop": ["rotational sweepout max mass", "meridian free boundary geodesic length",
                        "meridian length exceeds", "loop equal-angle residual", "loop length at most"],
    "shortening_properties": ["disk: length increases", "cap: homotopies", "revolution: fixed outcomes"],
    "network_audits": ["Y-network: worst junction residual", "crossed diameters: parity identity",
                       "revolution loop: worst Gauss-Bonnet", "diameter: face-concatenation bound"],
}


@pytest.mark.acceptance
@pytest.mark.parametrize("number,name,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name, limit):
    t0 = time.perf_counter()
    report = run_scenario(ScenarioConfig(name), write=False)
    elapsed = time.perf_counter() - t0
    quantities = [r.quantity for r in report.rows]
    missing = [q for q in REQUIRED[name] if not any(x.startswith(q) for x in quantities)]
    failed = [r.quantity for r in report.rows if not r.passed]
    ok = report.passed and not missing and elapsed < limit
    detail = f"{elapsed:.1f}s of {limit}s"
    if failed:
        detail += "; failing: " + "; ".join(failed)
    ACCEPTANCE.append(f"criterion {number} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    print(report.table())
    assert not missing, f"rows missing: {missing}"
    assert not failed, report.table()
    assert elapsed < limit, f"runtime {elapsed:.1f}s exceeds {limit}s"
