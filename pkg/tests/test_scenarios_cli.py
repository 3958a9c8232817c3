"""Scenario configuration, reports and the command-line interface."""

import json

import pytest

from geonet.cli import main
from geonet.errors import ConfigInvalid, UnknownScenario
from geonet.scenarios import (REGISTRY, ScenarioConfig, list_scenarios, run_scenario, unit_area_triangle,
                              unrolled_cone_loop)


def test_registry():
    assert list_scenarios() == sorted(["disk_widths", "second_variation", "sector_ls", "triangle_height",
                                       "boundary_inequality", "revolution_loop", "shortening_properties",
                                       "network_audits"])
    assert set(REGISTRY) == set(list_scenarios())


@pytest.mark.parametrize("bad", [{}, {"name": 3}, {"name": "x", "tolerances": {"a": -1}},
                                 {"name": "x", "colour": 1}, {"name": "x", "parameters": []},
                                 {"name": "x", "surface": {"kind": "Torus"}}])
def test_config_validation(bad):
    with pytest.raises(ConfigInvalid):
        ScenarioConfig.from_dict(bad)


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario(ScenarioConfig("nope"))


def test_reports_are_deterministic(tmp_path, monkeypatch):
    monkeypatch.delenv("GEONET_OUT", raising=False)
    a = run_scenario(ScenarioConfig("second_variation", output_dir=str(tmp_path / "a")))
    b = run_scenario(ScenarioConfig("second_variation", output_dir=str(tmp_path / "b")))
    assert a.passed and b.passed
    for f in ("report.json", "report.csv"):
        assert (tmp_path / "a" / "second_variation" / f).read_bytes() == \
            (tmp_path / "b" / "second_variation" / f).read_bytes()
    rep = json.loads((tmp_path / "a" / "second_variation" / "report.json").read_text())
    assert all(r["source"] in ("published", "derived", "trivial") for r in rep["rows"])


def test_env_overrides_output(tmp_path, monkeypatch):
    monkeypatch.setenv("GEONET_OUT", str(tmp_path / "env"))
    run_scenario(ScenarioConfig("second_variation", output_dir=str(tmp_path / "cfg")))
    assert (tmp_path / "env" / "second_variation" / "report.csv").exists()
    assert not (tmp_path / "cfg").exists()


def test_tolerance_override_can_fail():
    cfg = ScenarioConfig.from_dict({"name": "second_variation", "tolerances": {"fd": 1e-9}})
    rep = run_scenario(cfg, write=False)
    assert not rep.passed and rep.exit_code == 1


def test_unit_area_triangles():
    for args in ((1.0, 0.0), (0.8, 0.0), (1.2, 0.0), (1.0, 0.2)):
        (x0, y0), (x1, y1), (x2, y2) = unit_area_triangle(*args)
        assert abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) / 2 == pytest.approx(1.0)


def test_cone_check_rejects_short_tail():
    from geonet.surfaces import SurfaceOfRevolution
    S = SurfaceOfRevolution(1.0, 0.2, u1=1.0)
    assert not unrolled_cone_loop(S)[2]


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("GEONET_OUT", raising=False)
    assert main(["scenario", "list"]) == 0
    assert "disk_widths" in capsys.readouterr().out
    assert main(["scenario", "run", "nope"]) == 2
    assert main(["surface", "info", "--surface", '{"kind": "Torus"}']) == 2
    assert main(["not-a-command"]) == 2
    assert main(["scenario", "run", "second_variation", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "second_variation" / "report.json").exists()
    cfg = tmp_path / "strict.json"
    cfg.write_text(json.dumps({"tolerances": {"fd": 1e-9}}))
    assert main(["scenario", "run", "second_variation", "--config", str(cfg)]) == 1
    cfg.write_text("{not json")
    assert main(["scenario", "run", "second_variation", "--config", str(cfg)]) == 2


def test_cli_queries(capsys):
    assert main(["geodesic", "connect", "--start", "0 0", "--end", "0.3 0.4"]) == 0
    assert json.loads(capsys.readouterr().out)["length"] == pytest.approx(0.5)
    assert main(["fbg", "find"]) == 0
    assert json.loads(capsys.readouterr().out)["length"] == pytest.approx(2.0)
    assert main(["sweepout", "build", "--kind", "parallel", "--frames", "33"]) == 0
    assert json.loads(capsys.readouterr().out)["max_mass"] == pytest.approx(2.0)
    assert main(["shorten", "run", "--points", "[[0.6, -0.8], [0.6, 0.8]]"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "Collapsed"
    assert main(["geodesic", "shoot", "--point", "3 0", "--direction", "1 0"]) == 2
