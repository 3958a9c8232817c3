"""Command-line entry point: ``geonet <group> <action> ...``.

Results go to stdout as JSON (scenario runs print a table). Exit codes:
0 success, 1 a scenario assertion failed, 2 bad input or configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import surfaces as sf
from .birkhoff import choose_segment_count, project_to_lambda, shorten_run
from .errors import ConfigInvalid, GeonetError, IoFailure, UnknownScenario
from .geodesics import connect, drop_to_boundary, find_boundary_geodesic_loop, find_free_boundary_geodesic, shoot
from .network import GeodesicNetwork, check_stationarity, extract_faces
from .render import render_svg
from .scenarios import DEFAULT_SEED, ScenarioConfig, list_scenarios, run_scenario
from .sweepout import inscribed_polygon_sweepout, parallel_sweepout, rotational_sweepout, width_report

DEFAULT_SURFACE = '{"kind": "FlatConvexDomain", "params": {"shape": "disk", "radius": 1.0}}'


def _json_arg(text):
    """Inline JSON, or @path to read it from a file."""
    try:
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"invalid JSON: {exc}") from exc


def _floats(n):
    def parse(text):
        vals = [float(v) for v in text.replace(",", " ").split()]
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} numbers, got {text!r}")
        return vals
    return parse


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=_default)
    sys.stdout.write("\n")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o).__name__)


def _surface(args):
    return sf.from_json(_json_arg(args.surface))


# -- handlers ---------------------------------------------------------------


def cmd_surface_info(args):
    S = _surface(args)
    out = {"surface": S.to_json(), "area": S.area, "diameter": S.diameter,
           "boundary_length": S.boundary_length, "epsilon": S.epsilon(), "K_max": S.K_max,
           "convexity": sf.convexity_report(S)}
    _emit(out)


def cmd_geodesic_shoot(args):
    S = _surface(args)
    res = shoot(S, args.point, args.direction, args.max_length)
    _emit({"exit": list(res.exit), "path": res.path.to_json()})


def cmd_geodesic_connect(args):
    S = _surface(args)
    _emit(connect(S, args.start, args.end).to_json())


def cmd_geodesic_drop(args):
    S = _surface(args)
    path = drop_to_boundary(S, args.point)
    s, _d = S.project_to_boundary(path.points[-1])
    _emit({"s": s, "path": path.to_json()})


def cmd_fbg_find(args):
    S = _surface(args)
    path = find_free_boundary_geodesic(S, tuple(args.seed))
    _emit(path.to_json())


def cmd_loop_find(args):
    S = _surface(args)
    loop = find_boundary_geodesic_loop(S, args.seed_s)
    _emit({"vertex_s": loop.vertex_s, "angles": list(loop.angles), "closure_gap": loop.closure_gap,
           "asymmetry": loop.asymmetry, "path": loop.path.to_json()})


def cmd_shorten_run(args):
    S = _surface(args)
    pts = np.asarray(_json_arg(args.points), float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ConfigInvalid("--points must be a list of at least two chart points")
    if args.closed:
        amb = [S.embed(p) for p in pts]
        length = sum(S.distance(a, b) for a, b in zip(amb, amb[1:] + amb[:1]))
    else:
        amb = [S.embed(p) for p in pts]
        length = sum(S.distance(a, b) for a, b in zip(amb[:-1], amb[1:]))
    L = args.half_segments or max(2, choose_segment_count(S, length) // 2)
    sigma = project_to_lambda(S, pts, L, closed=args.closed, endpoints_on_boundary=not args.closed)
    out = shorten_run(S, sigma, max_iter=args.max_iter)
    if args.svg:
        render_svg(out, args.svg, S, title="shortening")
    final = out.trajectory[-1]
    _emit({"kind": out.kind, "iterations": len(out.lengths) - 1, "initial_length": out.lengths[0],
           "final_length": out.lengths[-1], "guard_hits": out.guard_hits,
           "final_vertices": final.chart_vertices(S).tolist()})


def cmd_network_check(args):
    desc = _json_arg(args.network)
    if not isinstance(desc, dict) or "segments" not in desc:
        raise ConfigInvalid("network JSON needs 'segments'")
    S = sf.from_json(desc.get("surface") or _json_arg(args.surface))
    net = GeodesicNetwork.from_json(S, desc)
    faces, split = extract_faces(net)
    reports = check_stationarity(split, args.tol)
    if args.svg:
        render_svg(net, args.svg, title="network")
    _emit({"mass": net.mass, "stationary": all(r.passed for r in reports),
           "junctions": [r.to_json() for r in reports], "faces": [f.to_json() for f in faces]})


def cmd_sweepout_build(args):
    S = _surface(args)
    meta = {}
    if args.kind == "parallel":
        d = args.direction or [1.0, 0.0]
        sw = parallel_sweepout(S, d, args.frames)
    elif args.kind == "rotational":
        sw = rotational_sweepout(S, args.frames)
    else:
        sw, bound = inscribed_polygon_sweepout(S, args.n)
        meta["bound"] = bound
    max_mass, conc = width_report(S, sw, args.radius)
    if args.svg:
        render_svg(sw, args.svg, S, title=f"{args.kind} sweepout")
    out = {"construction": sw.construction, "frames": len(sw.frames), "max_mass": max_mass,
           "concentration": conc, "radius": args.radius, **meta}
    if args.full:
        out["sweepout"] = sw.to_json(S)
    _emit(out)


def cmd_scenario_list(args):
    _emit(list_scenarios())


def cmd_scenario_run(args):
    base = _json_arg("@" + args.config) if args.config else {}
    if not isinstance(base, dict):
        raise ConfigInvalid("config file must hold a JSON object")
    base["name"] = args.name
    if args.out is not None:
        base["output_dir"] = args.out
    if args.seed is not None:
        base["seed"] = args.seed
    if args.svg:
        base["svg"] = True
    if args.surface is not None:
        base["surface"] = _json_arg(args.surface)
    cfg = ScenarioConfig.from_dict(base)
    if cfg.name not in list_scenarios():
        raise UnknownScenario(f"unknown scenario {cfg.name!r}; known: {', '.join(list_scenarios())}")
    report = run_scenario(cfg)
    print(report.table())
    return report.exit_code


# -- parser -----------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="geonet", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, help_):
        q = group.add_parser(name, help=help_)
        q.set_defaults(fn=fn)
        return q

    def with_surface(q, default=DEFAULT_SURFACE):
        q.add_argument("--surface", default=default, help="surface descriptor JSON or @file")
        return q

    g = groups.add_parser("surface", help="surface descriptors").add_subparsers(dest="action", required=True)
    with_surface(sub(g, "info", cmd_surface_info, "derived quantities of a surface"))

    g = groups.add_parser("geodesic", help="single geodesics").add_subparsers(dest="action", required=True)
    q = with_surface(sub(g, "shoot", cmd_geodesic_shoot, "follow a geodesic from a chart point"))
    q.add_argument("--point", type=_floats(2), required=True)
    q.add_argument("--direction", type=_floats(2), required=True)
    q.add_argument("--max-length", type=float, default=10.0)
    q = with_surface(sub(g, "connect", cmd_geodesic_connect, "shortest geodesic between two chart points"))
    q.add_argument("--start", type=_floats(2), required=True)
    q.add_argument("--end", type=_floats(2), required=True)
    q = with_surface(sub(g, "drop", cmd_geodesic_drop, "shortest geodesic to the boundary"))
    q.add_argument("--point", type=_floats(2), required=True)

    g = groups.add_parser("fbg", help="free boundary geodesics").add_subparsers(dest="action", required=True)
    q = with_surface(sub(g, "find", cmd_fbg_find, "Newton search from a boundary seed"))
    q.add_argument("--seed", type=_floats(2), default=[0.0, math.pi / 2], help="s and launch angle")

    g = groups.add_parser("loop", help="geodesic loops at the boundary").add_subparsers(dest="action",
                                                                                        required=True)
    q = with_surface(sub(g, "find", cmd_loop_find, "loop with equal boundary angles"))
    q.add_argument("--seed-s", type=float, default=0.0)

    g = groups.add_parser("shorten", help="curve shortening").add_subparsers(dest="action", required=True)
    q = with_surface(sub(g, "run", cmd_shorten_run, "iterate the shortening map"))
    q.add_argument("--points", required=True, help="JSON list of chart points or @file")
    q.add_argument("--closed", action="store_true")
    q.add_argument("--half-segments", type=int, default=None, help="L, half the number of segments")
    q.add_argument("--max-iter", type=int, default=2000)
    q.add_argument("--svg", default=None)

    g = groups.add_parser("network", help="geodesic networks").add_subparsers(dest="action", required=True)
    q = with_surface(sub(g, "check", cmd_network_check, "stationarity and faces of a network"))
    q.add_argument("--network", required=True, help="network JSON or @file")
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--svg", default=None)

    g = groups.add_parser("sweepout", help="sweepouts").add_subparsers(dest="action", required=True)
    q = with_surface(sub(g, "build", cmd_sweepout_build, "build a sweepout and report its width data"))
    q.add_argument("--kind", choices=["parallel", "rotational", "inscribed"], default="parallel")
    q.add_argument("--direction", type=_floats(2), default=None)
    q.add_argument("--frames", type=int, default=256)
    q.add_argument("--n", type=int, default=12, help="polygon size for inscribed sweepouts")
    q.add_argument("--radius", type=float, default=0.1, help="ball radius for concentration")
    q.add_argument("--full", action="store_true", help="include every frame in the output")
    q.add_argument("--svg", default=None)

    g = groups.add_parser("scenario", help="named reproducible scenarios").add_subparsers(dest="action",
                                                                                          required=True)
    sub(g, "list", cmd_scenario_list, "registered scenario names")
    q = sub(g, "run", cmd_scenario_run, "run a scenario and write its report")
    q.add_argument("name")
    q.add_argument("--config", default=None, help="JSON config file")
    q.add_argument("--out", default=None, help="output directory (GEONET_OUT wins)")
    q.add_argument("--seed", type=lambda t: int(t, 0), default=None, help=f"default {DEFAULT_SEED:#x}")
    q.add_argument("--surface", default=None, help="surface descriptor JSON or @file")
    q.add_argument("--svg", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        code = args.fn(args)
    except (ConfigInvalid, UnknownScenario, IoFailure) as exc:
        print(f"geonet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except GeonetError as exc:
        print(f"geonet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, TypeError) as exc:
        print(f"geonet: invalid input: {exc}", file=sys.stderr)
        return 2
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
