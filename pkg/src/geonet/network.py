"""Geodesic networks with multiplicities and their structural audits.

Segments are :class:`GeodesicPath` objects (ambient samples plus end
velocities).  Faces of the complement are found by a half-edge traversal
of the planar subdivision made of network segments and boundary arcs.
Face integrals (area, total curvature) are Green line integrals of the
potentials supplied by the surface, evaluated in its planar chart.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedNetwork, NonManifoldIncidence, ParityInconsistency, TriangulationFailure
from .geodesics import GeodesicPath, path_from_samples, sample_path, shoot_ambient
from .surfaces import SurfaceSpec, _unit

SNAP_TOL = 1e-8
TWO_PI = 2 * math.pi
LINE_H = 2e-3  # sample spacing for face line integrals


@dataclass
class End:
    segment: int
    at_start: bool
    direction: np.ndarray  # outgoing unit velocity
    multiplicity: int


@dataclass
class Junction:
    point: np.ndarray
    on_boundary: bool
    s: float | None
    ends: list = field(default_factory=list)

    @property
    def density(self) -> float:
        return 0.5 * sum(e.multiplicity for e in self.ends)


@dataclass
class JunctionReport:
    location: np.ndarray  # chart coordinates
    on_boundary: bool
    density: float
    residual: np.ndarray | float
    residual_norm: float
    passed: bool
    classification: str  # Regular | J_i | J_b | J_l | CrossingCandidate | Unclassified
    angles: list = field(default_factory=list)  # consecutive angles between incident ends

    def to_json(self):
        res = self.residual.tolist() if isinstance(self.residual, np.ndarray) else self.residual
        return {"location": list(map(float, self.location)), "on_boundary": self.on_boundary,
                "density": self.density, "residual": res, "residual_norm": self.residual_norm,
                "passed": self.passed, "classification": self.classification,
                "angles": [float(a) for a in self.angles]}


class GeodesicNetwork:
    """Finite collection of geodesic segments with positive integer multiplicities."""

    def __init__(self, surface: SurfaceSpec, segments):
        self.surface = surface
        self.segments = []
        for path, m in segments:
            if int(m) != m or m < 1:
                raise MalformedNetwork(f"multiplicity {m} is not a positive integer")
            self.segments.append((path, int(m)))
        self._junctions = None
        self._seg_ends = None
        self.crossings = []

    # construction helpers
    @classmethod
    def radial(cls, surface, center, directions, multiplicities=None):
        """Segments from an interior point to the boundary along the given unit vectors."""
        x = np.asarray(center, float)
        segs = []
        for k, v in enumerate(directions):
            v = _unit(surface.to_tangent(x, np.asarray(v, float)))
            res = shoot_ambient(surface, x, v, 4 * surface.diameter)
            m = 1 if multiplicities is None else multiplicities[k]
            segs.append((res.path, m))
        return cls(surface, segs)

    @property
    def mass(self) -> float:
        return float(sum(m * p.length for p, m in self.segments))

    # junction table
    def _build(self):
        S = self.surface
        js = []
        seg_ends = []

        def locate(x):
            for k, j in enumerate(js):
                if np.linalg.norm(j.point - x) < SNAP_TOL:
                    return k
            s, d = S.project_to_boundary(x)
            on_b = abs(d) < SNAP_TOL
            js.append(Junction(x.copy(), on_b, s if on_b else None))
            return len(js) - 1

        for i, (p, m) in enumerate(self.segments):
            a = locate(p.points[0])
            d0 = _unit(S.to_tangent(p.points[0], p.initial_velocity))
            js[a].ends.append(End(i, True, d0, m))
            b = locate(p.points[-1])
            d1 = _unit(S.to_tangent(p.points[-1], -p.end_velocity))
            js[b].ends.append(End(i, False, d1, m))
            seg_ends.append((a, b))
        self._junctions, self._seg_ends = js, seg_ends

    @property
    def junctions(self):
        if self._junctions is None:
            self._build()
        return self._junctions

    @property
    def segment_ends(self):
        if self._seg_ends is None:
            self._build()
        return self._seg_ends

    # serialization
    def to_json(self):
        return {"surface": self.surface.to_json(),
                "segments": [{"samples": p.samples.tolist(), "multiplicity": m}
                             for p, m in self.segments]}

    @classmethod
    def from_json(cls, surface, desc):
        segs = []
        for d in desc["segments"]:
            segs.append((path_from_samples(surface, d["samples"]), int(d.get("multiplicity", 1))))
        return cls(surface, segs)


def mass(net: GeodesicNetwork) -> float:
    return net.mass


# ---------------------------------------------------------------------------
# stationarity


def _sorted_ends(surface, j: Junction):
    """Incident ends sorted counterclockwise, with their angles from the reference."""
    if j.on_boundary:
        ref = surface.boundary_point(j.s)[1]
    else:
        ref = j.ends[0].direction
    angs = [surface.signed_angle(j.point, ref, e.direction) % TWO_PI for e in j.ends]
    order = np.argsort(angs, kind="stable")
    return [j.ends[i] for i in order], [angs[i] for i in order]


def _consecutive_angles(surface, j: Junction):
    ends, angs = _sorted_ends(surface, j)
    if len(ends) < 2:
        return []
    if j.on_boundary:
        return [angs[k + 1] - angs[k] for k in range(len(angs) - 1)]
    return [(angs[(k + 1) % len(angs)] - angs[k]) % TWO_PI or TWO_PI for k in range(len(angs))]


def _classify(surface, j: Junction) -> str:
    th = j.density
    dirs = [e.direction for e in j.ends]
    if not j.on_boundary:
        if th < 1:
            raise MalformedNetwork(f"dangling interior endpoint at {surface.chart(j.point)}")
        if th >= 3:
            return "J_i"
        if len(dirs) == 2 and th == 1 and dirs[0] @ dirs[1] < -1 + 1e-9:
            return "Regular"
        if th == 2 and len(dirs) == 4:
            # two geodesics passing straight through each other
            unmatched = list(range(4))
            while unmatched:
                a = unmatched.pop(0)
                partner = [b for b in unmatched if dirs[a] @ dirs[b] < -1 + 1e-9]
                if not partner:
                    return "Unclassified"
                unmatched.remove(partner[0])
            return "CrossingCandidate"
        return "Unclassified"
    if th >= 1.5:
        return "J_b"
    if th == 1 and len(dirs) == 2 and np.linalg.norm(dirs[0] - dirs[1]) > 1e-9:
        return "J_l"
    return "Regular"


def check_stationarity(net: GeodesicNetwork, tol: float = 1e-8):
    """Balance residual, density and classification of every junction."""
    S = net.surface
    reports = []
    for j in net.junctions:
        total = sum(e.multiplicity * e.direction for e in j.ends)
        if j.on_boundary:
            t = S.boundary_point(j.s)[1]
            res = float(total @ t)
            rn = abs(res)
        else:
            res = total
            rn = float(np.linalg.norm(total))
        cls = _classify(S, j)
        reports.append(JunctionReport(S.chart(j.point), j.on_boundary, j.density, res, rn,
                                      rn < tol, cls, _consecutive_angles(S, j)))
    return reports


# named hypothesis predicates; each returns the list of offending junction indices


def density_integrality(reports):
    """Interior junctions whose density is not a positive integer."""
    return [i for i, r in enumerate(reports)
            if not r.on_boundary and (r.density < 1 or r.density != int(r.density))]


w1_violations = density_integrality


def w2_violations(reports, tol=1e-9):
    """Interior junctions with two consecutive segments at angle >= pi."""
    return [i for i, r in enumerate(reports)
            if not r.on_boundary and any(a >= math.pi - tol for a in r.angles) and r.classification != "Regular"]


def w3_violations(net: GeodesicNetwork, tol=1e-9):
    """Boundary junctions where an outermost segment makes an angle > pi/2 with the boundary side."""
    S = net.surface
    bad = []
    for i, j in enumerate(net.junctions):
        if not j.on_boundary or not j.ends:
            continue
        _ends, angs = _sorted_ends(S, j)
        if angs[0] > math.pi / 2 + tol or math.pi - angs[-1] > math.pi / 2 + tol:
            bad.append(i)
    return bad


def connected_components(net: GeodesicNetwork) -> int:
    """Number of connected components of the network support."""
    n = len(net.junctions)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in net.segment_ends:
        parent[find(a)] = find(b)
    return len({find(k) for k in range(n)})


# ---------------------------------------------------------------------------
# crossings


def _dense(surface, path: GeodesicPath, spacing):
    n = max(3, int(math.ceil(path.length / spacing)) + 1)
    ts = np.linspace(0.0, path.length, n)
    P, _V = surface.flow_samples(path.points[0], path.initial_velocity, ts)
    P = np.asarray(P)
    P[0], P[-1] = path.points[0], path.points[-1]
    return ts, P


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _point_polyline_dist(P, Q):
    """Distance from each point of P to the polyline Q (planar)."""
    A, B = Q[:-1], Q[1:]
    AB = B - A
    L2 = np.maximum((AB ** 2).sum(-1), 1e-300)
    out = np.empty(len(P))
    for k, p in enumerate(P):
        t = np.clip(((p - A) * AB).sum(-1) / L2, 0, 1)
        out[k] = np.sqrt((((A + t[:, None] * AB) - p) ** 2).sum(-1)).min()
    return out


def _refine_crossing(surface, pa, pb, ta, tb):
    def F(z):
        xa = surface.exp(pa.points[0], pa.initial_velocity, z[0])[0]
        xb = surface.exp(pb.points[0], pb.initial_velocity, z[1])[0]
        return surface.planar(xa) - surface.planar(xb)

    z = np.array([ta, tb], float)
    for _ in range(30):
        f = F(z)
        if np.linalg.norm(f) < 1e-14:
            break
        h = 1e-7
        J = np.column_stack([(F(z + h * e) - f) / h for e in np.eye(2)])
        try:
            z = z - np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            break
    return z


def split_crossings(net: GeodesicNetwork, spacing=1e-2, overlap_samples=10) -> GeodesicNetwork:
    """Network with every transversal crossing of two segments registered as a vertex."""
    S = net.surface
    dense = [_dense(S, p, spacing) for p, _m in net.segments]
    planar = [np.array([S.planar(x) for x in P]) for _ts, P in dense]
    cuts = {i: [] for i in range(len(net.segments))}
    points = []
    for i in range(len(net.segments)):
        for k in range(i + 1, len(net.segments)):
            Pa, Pb = planar[i], planar[k]
            pa, pb = net.segments[i][0], net.segments[k][0]
            close = _point_polyline_dist(Pb, Pa) < 1e-7
            run = best = 0
            for c in close:
                run = run + 1 if c else 0
                best = max(best, run)
            if best > overlap_samples:
                raise NonManifoldIncidence(f"segments {i} and {k} overlap tangentially")
            A0, A1 = Pa[:-1], Pa[1:]
            for q in range(len(Pb) - 1):
                d1 = _orient(A0, A1, Pb[q])
                d2 = _orient(A0, A1, Pb[q + 1])
                d3 = _orient(Pb[q], Pb[q + 1], A0)
                d4 = _orient(Pb[q], Pb[q + 1], A1)
                hit = np.nonzero((d1 * d2 <= 0) & (d3 * d4 <= 0))[0]
                for e in hit:
                    ta = dense[i][0][e] + 0.5 * (dense[i][0][e + 1] - dense[i][0][e])
                    tb = dense[k][0][q] + 0.5 * (dense[k][0][q + 1] - dense[k][0][q])
                    ta, tb = _refine_crossing(S, pa, pb, ta, tb)
                    if not (SNAP_TOL < ta < pa.length - SNAP_TOL and SNAP_TOL < tb < pb.length - SNAP_TOL):
                        continue
                    x = S.exp(pa.points[0], pa.initial_velocity, ta)[0]
                    if any(np.linalg.norm(x - y) < SNAP_TOL for y in points):
                        if all(abs(t - ta) > SNAP_TOL for t in cuts[i]):
                            cuts[i].append(ta)
                        if all(abs(t - tb) > SNAP_TOL for t in cuts[k]):
                            cuts[k].append(tb)
                        continue
                    points.append(x)
                    cuts[i].append(ta)
                    cuts[k].append(tb)
    segs = []
    for i, (p, m) in enumerate(net.segments):
        ts = sorted(cuts[i])
        if not ts:
            segs.append((p, m))
            continue
        bounds = [0.0] + ts + [p.length]
        for a, b in zip(bounds[:-1], bounds[1:]):
            x, v = S.exp(p.points[0], p.initial_velocity, a) if a > 0 else (p.points[0], p.initial_velocity)
            piece = sample_path(S, x, v, b - a)
            if b == p.length:
                piece.points[-1] = p.points[-1]
            segs.append((piece, m))
    out = GeodesicNetwork(S, segs)
    out.crossings = points
    return out


# ---------------------------------------------------------------------------
# faces


@dataclass
class Corner:
    point: np.ndarray
    interior_angle: float
    kind: str  # "network" or "boundary"
    junction: int


@dataclass
class Face:
    boundary_word: list  # outer cycle: ("segment", i, forward) or ("boundary", s0, s1)
    holes: list
    corners: list
    turning_angles: list
    euler_char: int
    area: float
    curvature_integral: float
    kg_integral: float

    def segment_sides(self):
        return [(e[1], e[2]) for cyc in [self.boundary_word] + self.holes for e in cyc if e[0] == "segment"]

    def to_json(self):
        return {"boundary_word": [list(map(_jsonable, e)) for e in self.boundary_word],
                "n_holes": len(self.holes),
                "corners": [{"angle": c.interior_angle, "kind": c.kind, "junction": c.junction}
                            for c in self.corners],
                "turning_angles": [float(t) for t in self.turning_angles],
                "euler_char": self.euler_char, "area": self.area,
                "curvature_integral": self.curvature_integral, "kg_integral": self.kg_integral}


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _form_weights(surface, X):
    """Planar points and the smooth factors g with f dtheta = g (x dy - y dx)."""
    P = np.array([surface.planar(x) for x in X])
    r2 = (P ** 2).sum(-1)
    gA = np.full(len(X), 0.5)
    gB = np.zeros(len(X))
    if surface.K_max > 0:
        for k, x in enumerate(X):
            if r2[k] < 1e-24:
                gB[k] = 0.5 * surface.curvature_at_point(x)
            else:
                _th, A, B = surface.potentials(x)
                gA[k] = A / r2[k]
                gB[k] = B / r2[k]
    return P, gA, gB


def _line_integrals(surface, X):
    """(area, curvature) line integrals along a polyline of 2n+1 uniform samples, extrapolated."""
    P, gA, gB = _form_weights(surface, X)

    def trap(idx):
        Q = P[idx]
        cr = Q[:-1, 0] * Q[1:, 1] - Q[:-1, 1] * Q[1:, 0]
        a = 0.5 * ((gA[idx][:-1] + gA[idx][1:]) * cr).sum()
        b = 0.5 * ((gB[idx][:-1] + gB[idx][1:]) * cr).sum()
        return np.array([a, b])

    full = trap(np.arange(len(P)))
    if len(P) >= 5 and len(P) % 2 == 1:
        half = trap(np.arange(0, len(P), 2))
        full = (4 * full - half) / 3
    return full, P


def _odd_count(length, h=LINE_H):
    n = max(2, int(math.ceil(length / h / 2)))
    return 2 * n + 1


class _Subdivision:
    """Half-edge structure of network segments plus boundary arcs."""

    def __init__(self, net: GeodesicNetwork):
        S = net.surface
        self.net = net
        self.S = S
        js = net.junctions
        self.hedges = []  # dict(tail, head, out_dir, rev_dir, kind, data)
        for i, (p, _m) in enumerate(net.segments):
            a, b = net.segment_ends[i]
            d0 = _unit(S.to_tangent(p.points[0], p.initial_velocity))
            d1 = _unit(S.to_tangent(p.points[-1], -p.end_velocity))
            self.hedges.append(dict(tail=a, head=b, out=d0, rev=d1, kind="segment", data=(i, True)))
            self.hedges.append(dict(tail=b, head=a, out=d1, rev=d0, kind="segment", data=(i, False)))
        T = S.boundary_length
        bverts = sorted([k for k, j in enumerate(js) if j.on_boundary], key=lambda k: js[k].s)
        self.full_boundary = not bverts
        for n_, k in enumerate(bverts):
            k2 = bverts[(n_ + 1) % len(bverts)]
            s0 = js[k].s
            s1 = js[k2].s
            if s1 <= s0 + 1e-12:
                s1 += T
            t0 = S.boundary_point(s0)[1]
            t1 = S.boundary_point(s1)[1]
            self.hedges.append(dict(tail=k, head=k2, out=t0, rev=-t1, kind="boundary", data=(s0, s1)))
        self.outgoing = {k: [] for k in range(len(js))}
        for h, e in enumerate(self.hedges):
            self.outgoing[e["tail"]].append(h)
        self.ref = {}
        for k, j in enumerate(js):
            self.ref[k] = S.boundary_point(j.s)[1] if j.on_boundary else (
                self.hedges[self.outgoing[k][0]]["out"] if self.outgoing[k] else None)

    def angle(self, k, d):
        return self.S.signed_angle(self.net.junctions[k].point, self.ref[k], d) % TWO_PI

    def next(self, h):
        e = self.hedges[h]
        v = e["head"]
        a_rev = self.angle(v, e["rev"])
        best, best_gap = None, None
        for g in self.outgoing[v]:
            gap = (a_rev - self.angle(v, self.hedges[g]["out"])) % TWO_PI
            if gap < 1e-12 or gap > TWO_PI - 1e-12:
                gap = TWO_PI
            if best_gap is None or gap < best_gap:
                best, best_gap = g, gap
        return best, best_gap

    def cycles(self):
        seen = set()
        out = []
        for h0 in range(len(self.hedges)):
            if h0 in seen:
                continue
            cyc, corners = [], []
            h = h0
            while h not in seen:
                seen.add(h)
                cyc.append(h)
                g, ang = self.next(h)
                corners.append((self.hedges[h]["head"], ang, h, g))
                h = g
            out.append((cyc, corners))
        return out

    def edge_samples(self, h):
        """Dense ambient samples along a half-edge, in traversal order."""
        e = self.hedges[h]
        S = self.S
        if e["kind"] == "boundary":
            s0, s1 = e["data"]
            ss = np.linspace(s0, s1, _odd_count(s1 - s0))
            return np.array([S.boundary_point(s)[0] for s in ss])
        i, fwd = e["data"]
        p = self.net.segments[i][0]
        ts = np.linspace(0.0, p.length, _odd_count(p.length))
        X, _V = S.flow_samples(p.points[0], p.initial_velocity, ts)
        X = np.asarray(X)
        X[0], X[-1] = p.points[0], p.points[-1]
        return X if fwd else X[::-1]

    def cycle_data(self, cyc):
        area = curv = kg = 0.0
        poly = []
        for h in cyc:
            (a, b), P = _line_integrals(self.S, self.edge_samples(h))
            area += a
            curv += b
            poly.append(P[:-1])
            e = self.hedges[h]
            if e["kind"] == "boundary":
                kg += self.S.kg_integral(*e["data"])
        return area, curv, kg, np.vstack(poly)

    def word(self, cyc):
        out = []
        for h in cyc:
            e = self.hedges[h]
            out.append(("segment", e["data"][0], e["data"][1]) if e["kind"] == "segment"
                       else ("boundary", e["data"][0], e["data"][1]))
        return out


def _inside(poly, p):
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def extract_faces(net: GeodesicNetwork, split=True):
    """Faces of the complement of the network support in the surface."""
    if split:
        net = split_crossings(net)
    S = net.surface
    sub = _Subdivision(net)
    cycles = sub.cycles()
    data = [sub.cycle_data(c) for c, _ in cycles]
    outer, holes = [], []
    for k, (cyc, corners) in enumerate(cycles):
        (outer if data[k][0] > 0 else holes).append(k)
    if sub.full_boundary:
        # the boundary circle has no vertex: it is its own outer cycle
        T = S.boundary_length
        ss = np.linspace(0.0, T, _odd_count(T))
        X = np.array([S.boundary_point(s)[0] for s in ss])
        (a, b), P = _line_integrals(S, X)
        cycles.append(([], []))
        data.append((a, b, S.kg_integral(0.0, T), P[:-1]))
        outer.append(len(cycles) - 1)
    owner = {k: [] for k in outer}
    for h in holes:
        p = data[h][3][0]
        cands = [k for k in outer if _inside(data[k][3], p)]
        if not cands:
            raise TriangulationFailure("hole cycle outside every face")
        owner[min(cands, key=lambda k: data[k][0])].append(h)
    faces = []
    for k in outer:
        ks = [k] + owner[k]
        area = sum(data[q][0] for q in ks)
        curv = sum(data[q][1] for q in ks)
        kg = sum(data[q][2] for q in ks)
        corners = []
        for q in ks:
            for v, ang, h, g in cycles[q][1]:
                kind = "boundary" if "boundary" in (sub.hedges[h]["kind"], sub.hedges[g]["kind"]) else "network"
                corners.append(Corner(net.junctions[v].point, float(ang), kind, v))
        if not cycles[k][0]:
            word = [("boundary", 0.0, S.boundary_length)]
        else:
            word = sub.word(cycles[k][0])
        faces.append(Face(word, [sub.word(cycles[q][0]) for q in owner[k]], corners,
                          [math.pi - c.interior_angle for c in corners], 1 - len(owner[k]),
                          float(area), float(curv), float(kg)))
    faces.sort(key=lambda f: -f.area)
    return faces, net


def check_star_property(face: Face, tol=1e-9):
    """Inner angles below pi, geodesic-to-boundary corners at most pi/2."""
    bad = []
    for k, c in enumerate(face.corners):
        if c.kind == "boundary":
            if c.interior_angle > math.pi / 2 + tol:
                bad.append((k, c.interior_angle, "boundary corner exceeds pi/2"))
        elif abs(c.interior_angle - math.pi) > tol and c.interior_angle >= math.pi - tol:
            bad.append((k, c.interior_angle, "inner angle not below pi"))
    return not bad, bad


def gauss_bonnet_audit(surface: SurfaceSpec, face: Face) -> float:
    """|curvature integral + boundary k_g integral + turning angles - 2 pi chi|."""
    vals = [face.curvature_integral, face.kg_integral] + list(face.turning_angles)
    if not all(math.isfinite(v) for v in vals):
        raise TriangulationFailure("non-finite face integral")
    return abs(sum(vals) - TWO_PI * face.euler_char)


# ---------------------------------------------------------------------------
# parity


def parity_decomposition(net: GeodesicNetwork, faces=None):
    """Two-colouring (I, J) of faces by crossing parity; Gamma = odd-multiplicity segments."""
    if faces is None:
        faces, net = extract_faces(net)
    side_face = {}
    for f, face in enumerate(faces):
        for i, fwd in face.segment_sides():
            side_face[(i, fwd)] = f
    adj = {f: [] for f in range(len(faces))}
    for i, (_p, m) in enumerate(net.segments):
        a, b = side_face.get((i, True)), side_face.get((i, False))
        if a is None or b is None:
            continue
        adj[a].append((b, m % 2))
        adj[b].append((a, m % 2))
    colour = {}
    for root in range(len(faces)):
        if root in colour:
            continue
        colour[root] = 0
        dq = deque([root])
        while dq:
            f = dq.popleft()
            for g, par in adj[f]:
                want = colour[f] ^ par
                if g not in colour:
                    colour[g] = want
                    dq.append(g)
                elif colour[g] != want:
                    raise ParityInconsistency(
                        f"faces {f} and {g} get inconsistent colours: a junction density is not an integer")
    I = sorted(f for f, c in colour.items() if c == 0)
    J = sorted(f for f, c in colour.items() if c == 1)
    gamma = sorted(i for i, (_p, m) in enumerate(net.segments) if m % 2 == 1)
    return I, J, gamma


def boundary_parity(faces, face_set):
    """Mod 2 sum of the face boundaries: segments bordering an odd number of sides in the set."""
    count = {}
    for f in face_set:
        for i, _fwd in faces[f].segment_sides():
            count[i] = count.get(i, 0) + 1
    return sorted(i for i, c in count.items() if c % 2 == 1)


def parity_identity_holds(faces, I, J, gamma) -> bool:
    """Both colour classes have mod 2 boundary equal to the odd-multiplicity segments."""
    return boundary_parity(faces, I) == sorted(gamma) == boundary_parity(faces, J)
