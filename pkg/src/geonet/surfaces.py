"""Catalog of compact surfaces with strictly convex boundary.

Every surface exposes two views of the same data:

* a global chart (the coordinates users see): Cartesian ``(x, y)`` for flat
  domains, ``(u, theta)`` for the surface of revolution and ``(phi, theta)``
  for the spherical cap;
* an isometric embedding in R^3, used internally by the geodesic machinery so
  that chart singularities (the apex of the revolution surface, the pole of
  the cap) never reach an integrator.

The metric, Christoffel symbols and Gaussian curvature are analytic in the
chart. Boundary data are parametrized by arc length ``s in [0, T)``, traversed
so that the interior lies on the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _ode
from .errors import ConfigInvalid, PointOutsideDomain

TWO_PI = 2.0 * math.pi
INSIDE_TOL = 1e-9


def _unit(v):
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class TangentVector:
    base: tuple
    components: tuple

    def norm(self, surface: "SurfaceSpec") -> float:
        g = surface.metric_at(self.base)
        w = np.asarray(self.components, float)
        return float(math.sqrt(w @ g @ w))

    def normalized(self, surface: "SurfaceSpec") -> "TangentVector":
        n = self.norm(surface)
        return TangentVector(self.base, tuple(np.asarray(self.components, float) / n))


# ---------------------------------------------------------------------------
# boundary pieces for flat domains


@dataclass(frozen=True)
class Segment:
    p0: np.ndarray
    p1: np.ndarray

    @property
    def length(self):
        return float(np.linalg.norm(self.p1 - self.p0))

    @property
    def tangent(self):
        return _unit(self.p1 - self.p0)

    @property
    def outward(self):
        t = self.tangent
        return np.array([t[1], -t[0]])

    def point(self, sig):
        return self.p0 + sig * self.tangent

    def tangent_at(self, sig):
        return self.tangent

    def kg(self, sig):
        return 0.0

    def support(self, x):
        """Signed distance of x beyond the supporting line, and foot parameter."""
        n = self.outward
        g = float((x - self.p0) @ n)
        sig = float(np.clip((x - self.p0) @ self.tangent, 0.0, self.length))
        return g, sig

    def line_hits(self, p, w):
        # p + t w = p0 + sig tau
        tau = self.tangent
        M = np.array([[w[0], -tau[0]], [w[1], -tau[1]]])
        det = np.linalg.det(M)
        if abs(det) < 1e-15:
            return []
        t, sig = np.linalg.solve(M, self.p0 - p)
        if -1e-12 <= sig <= self.length + 1e-12:
            return [float(t)]
        return []


@dataclass(frozen=True)
class Arc:
    center: np.ndarray
    radius: float
    a0: float
    a1: float

    @property
    def length(self):
        return self.radius * (self.a1 - self.a0)

    def point(self, sig):
        a = self.a0 + sig / self.radius
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def tangent_at(self, sig):
        a = self.a0 + sig / self.radius
        return np.array([-math.sin(a), math.cos(a)])

    def kg(self, sig):
        return 1.0 / self.radius

    def _angle_in_range(self, x):
        d = x - self.center
        if np.hypot(d[0], d[1]) < 1e-300:
            return self.a0
        ang = math.atan2(d[1], d[0])
        # bring into [a0, a0 + 2pi)
        ang = self.a0 + (ang - self.a0) % TWO_PI
        if ang <= self.a1:
            return ang
        # nearest end in angular sense
        if ang - self.a1 < self.a0 + TWO_PI - ang:
            return self.a1
        return self.a0

    def support(self, x):
        ang = self._angle_in_range(x)
        u = np.array([math.cos(ang), math.sin(ang)])
        g = float((x - self.center) @ u) - self.radius
        return g, (ang - self.a0) * self.radius

    def line_hits(self, p, w):
        d = p - self.center
        bq = float(d @ w)
        cq = float(d @ d) - self.radius ** 2
        disc = bq * bq - cq
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        out = []
        for t in (-bq - sq, -bq + sq):
            q = p + t * w - self.center
            ang = math.atan2(q[1], q[0])
            ang = self.a0 + (ang - self.a0) % TWO_PI
            if ang <= self.a1 + 1e-12 or ang >= self.a0 + TWO_PI - 1e-12:
                out.append(float(t))
        return out


def _offset_pieces(core, rho):
    """Boundary of the Minkowski sum of a convex core with a disk of radius rho."""
    if rho == 0.0:
        return list(core)
    out = []
    n = len(core)
    for i, pc in enumerate(core):
        if isinstance(pc, Segment):
            sh = rho * pc.outward
            out.append(Segment(pc.p0 + sh, pc.p1 + sh))
        else:
            out.append(Arc(pc.center, pc.radius + rho, pc.a0, pc.a1))
        nxt = core[(i + 1) % n]
        t_end = pc.tangent_at(pc.length)
        t_next = nxt.tangent_at(0.0)
        turn = math.atan2(t_end[0] * t_next[1] - t_end[1] * t_next[0], t_end @ t_next)
        if turn > 1e-12:
            corner = pc.point(pc.length)
            a0 = math.atan2(-t_end[0], t_end[1])  # outward normal angle = tangent - pi/2
            out.append(Arc(corner, rho, a0, a0 + turn))
    return out


# ---------------------------------------------------------------------------
# surface catalog


class SurfaceSpec:
    """Common interface; concrete kinds override the geometry hooks."""

    kind = "abstract"
    K_max = 0.0

    # chart ------------------------------------------------------------
    def contains(self, coords) -> bool:
        raise NotImplementedError

    def check(self, coords):
        if not self.contains(coords):
            raise PointOutsideDomain(f"{coords!r} is outside the {self.kind} domain")

    def embed(self, coords) -> np.ndarray:
        raise NotImplementedError

    def chart(self, x) -> np.ndarray:
        raise NotImplementedError

    def chart_jacobian(self, coords) -> np.ndarray:
        """3x2 matrix of partial derivatives of the embedding."""
        raise NotImplementedError

    # intrinsic quantities in the chart
    def metric_at(self, coords) -> np.ndarray:
        raise NotImplementedError

    def christoffel_at(self, coords) -> np.ndarray:
        raise NotImplementedError

    def gauss_curvature_at(self, coords) -> float:
        raise NotImplementedError

    # ambient helpers ---------------------------------------------------
    def normal(self, x) -> np.ndarray:
        raise NotImplementedError

    def tangent_basis(self, x):
        n = self.normal(x)
        a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = _unit(a - (a @ n) * n)
        e2 = np.cross(n, e1)
        return e1, e2

    def to_tangent(self, x, v):
        n = self.normal(x)
        return v - (v @ n) * n

    def signed_angle(self, x, a, b):
        """Angle from a to b in the oriented tangent plane at x."""
        n = self.normal(x)
        return math.atan2(float(n @ np.cross(a, b)), float(a @ b))

    def curvature_at_point(self, x) -> float:
        return self.gauss_curvature_at(self.chart(x))

    def vector_to_chart(self, x, v):
        J = self.chart_jacobian(self.chart(x))
        return np.linalg.lstsq(J, v, rcond=None)[0]

    def vector_from_chart(self, coords, w):
        return self.chart_jacobian(coords) @ np.asarray(w, float)

    # boundary ------------------------------------------------------------
    boundary_length: float

    def boundary_point(self, s):
        """(x, unit tangent, inward unit normal, k_g) at arc length s (ambient)."""
        raise NotImplementedError

    def boundary_fn(self, x) -> float:
        """Positive inside, zero on the boundary."""
        raise NotImplementedError

    def project_to_boundary(self, x):
        """(s*, distance) of the nearest boundary point; ties -> smallest s."""
        raise NotImplementedError

    def kg_integral(self, s0, s1) -> float:
        """Integral of boundary geodesic curvature over [s0, s1] (s1 may exceed T)."""
        raise NotImplementedError

    def boundary_kg_min(self, n=1000) -> float:
        return min(self.boundary_point(s)[3] for s in np.linspace(0, self.boundary_length, n, endpoint=False))

    # geodesics -------------------------------------------------------------
    def exp(self, x, v, t):
        """Follow the geodesic from x with unit velocity v for arc length t."""
        raise NotImplementedError

    def flow_samples(self, x, v, ts):
        """Positions and velocities at the increasing arc lengths ts."""
        xs, vs = zip(*(self.exp(x, v, t) for t in ts))
        return np.array(xs), np.array(vs)

    def exit_time(self, x, v, max_length):
        """Arc length at which the geodesic leaves the domain, or None."""
        raise NotImplementedError

    def distance(self, x, y):
        """Closed-form geodesic distance when available, else None."""
        return None

    def direction_to(self, x, y):
        """Closed-form initial unit velocity of the shortest geodesic, else None."""
        return None

    # area / curvature potentials for Gauss-Bonnet line integrals
    def planar(self, x) -> np.ndarray:
        """Orientation-preserving homeomorphism of the surface onto a planar disk."""
        raise NotImplementedError

    def potentials(self, x):
        """(theta, A, B) with dA = area form and dB = K area form via d(f dtheta)."""
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def area(self) -> float:
        raise NotImplementedError

    def epsilon(self) -> float:
        """Segment-length bound for broken geodesics (conservative injectivity proxy)."""
        bounds = [0.5 * self.diameter]
        if self.K_max > 0:
            bounds.append(math.pi / math.sqrt(self.K_max))
        kg = self.boundary_kg_max()
        if kg > 0 and math.isfinite(kg):
            bounds.append(1.0 / kg)
        return 0.9 * min(bounds)

    def boundary_kg_max(self) -> float:
        return max(self.boundary_point(s)[3] for s in np.linspace(0, self.boundary_length, 256, endpoint=False))

    def to_json(self) -> dict:
        raise NotImplementedError


class FlatConvexDomain(SurfaceSpec):
    """Planar convex region bounded by straight segments and circular arcs."""

    kind = "FlatConvexDomain"

    def __init__(self, pieces, descriptor=None, rho=0.0):
        self.pieces = list(pieces)
        self.rho = float(rho)
        self._descriptor = descriptor or {}
        lengths = np.array([p.length for p in self.pieces])
        self._starts = np.concatenate([[0.0], np.cumsum(lengths)])
        self.boundary_length = float(self._starts[-1])
        pts = np.array([p.point(t) for p in self.pieces for t in np.linspace(0, p.length, 65)])
        self._hull_pts = pts
        d = pts[:, None, :] - pts[None, :, :]
        self._diameter = float(np.sqrt((d ** 2).sum(-1)).max())
        self._area = self._compute_area()

    # constructors
    @classmethod
    def disk(cls, radius=1.0, center=(0.0, 0.0)):
        c = np.asarray(center, float)
        return cls([Arc(c, float(radius), 0.0, TWO_PI)],
                   {"shape": "disk", "radius": radius, "center": list(center)})

    @classmethod
    def polygon(cls, vertices, rho=0.0):
        V = np.asarray(vertices, float)
        area2 = np.sum(V[:, 0] * np.roll(V[:, 1], -1) - np.roll(V[:, 0], -1) * V[:, 1])
        if area2 < 0:
            V = V[::-1]
        n = len(V)
        if rho > 0:
            # shift every edge inward by rho and intersect consecutive lines
            pts, dirs = [], []
            for i in range(n):
                t = _unit(V[(i + 1) % n] - V[i])
                pts.append(V[i] + rho * np.array([-t[1], t[0]]))
                dirs.append(t)
            core_v = []
            for i in range(n):
                j = i - 1
                M = np.column_stack([dirs[j], -dirs[i]])
                a, _b = np.linalg.solve(M, pts[i] - pts[j])
                core_v.append(pts[j] + a * dirs[j])
            C = np.array(core_v)
        else:
            C = V
        core = [Segment(C[i], C[(i + 1) % n]) for i in range(n)]
        desc = {"shape": "polygon", "vertices": np.asarray(vertices, float).tolist(), "rho": rho}
        return cls(_offset_pieces(core, rho), desc, rho)

    @classmethod
    def equilateral(cls, area=1.0, rho=0.0):
        side = math.sqrt(4.0 * area / math.sqrt(3.0))
        V = [(0.0, 0.0), (side, 0.0), (side / 2, side * math.sqrt(3) / 2)]
        dom = cls.polygon(V, rho)
        dom._descriptor = {"shape": "equilateral", "area": area, "rho": rho}
        return dom

    @classmethod
    def sector(cls, angle, radius=1.0, rho=0.0):
        if not 0 < angle < math.pi:
            raise ConfigInvalid("sector angle must lie in (0, pi)")
        Rc = radius - rho
        if rho > 0:
            n2 = np.array([math.sin(angle), -math.cos(angle)])
            # apex of the core: y = rho and n2 . x = rho
            M = np.array([[0.0, 1.0], n2])
            q = np.linalg.solve(M, np.array([rho, rho]))
            b = math.asin(rho / Rc)
        else:
            q = np.zeros(2)
            b = 0.0
        e1_end = Rc * np.array([math.cos(b), math.sin(b)])
        e2_start = Rc * np.array([math.cos(angle - b), math.sin(angle - b)])
        core = [Segment(q, e1_end), Arc(np.zeros(2), Rc, b, angle - b), Segment(e2_start, q)]
        desc = {"shape": "sector", "angle": angle, "radius": radius, "rho": rho}
        return cls(_offset_pieces(core, rho), desc, rho)

    # chart
    def contains(self, coords):
        return self.boundary_fn(self.embed(coords)) >= -INSIDE_TOL

    def embed(self, coords):
        return np.array([coords[0], coords[1], 0.0], float)

    def chart(self, x):
        return np.array([x[0], x[1]], float)

    def chart_jacobian(self, coords):
        return np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

    def metric_at(self, coords):
        self.check(coords)
        return np.eye(2)

    def christoffel_at(self, coords):
        self.check(coords)
        return np.zeros((2, 2, 2))

    def gauss_curvature_at(self, coords):
        self.check(coords)
        return 0.0

    def curvature_at_point(self, x):
        return 0.0

    def normal(self, x):
        return np.array([0.0, 0.0, 1.0])

    def tangent_basis(self, x):
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])

    # boundary
    def _locate(self, s):
        s = s % self.boundary_length
        i = int(np.searchsorted(self._starts, s, side="right") - 1)
        i = min(max(i, 0), len(self.pieces) - 1)
        return i, s - self._starts[i]

    def boundary_point(self, s):
        i, sig = self._locate(s)
        pc = self.pieces[i]
        p = pc.point(sig)
        t = pc.tangent_at(sig)
        nu = np.array([-t[1], t[0]])
        return (np.array([p[0], p[1], 0.0]), np.array([t[0], t[1], 0.0]),
                np.array([nu[0], nu[1], 0.0]), pc.kg(sig))

    def boundary_fn(self, x):
        p = np.asarray(x[:2], float)
        return -max(pc.support(p)[0] for pc in self.pieces)

    def project_to_boundary(self, x):
        p = np.asarray(x[:2], float)
        best = None
        for i, pc in enumerate(self.pieces):
            _g, sig = pc.support(p)
            # true distance to the piece; supporting values tie at shared lines
            d = float(np.linalg.norm(p - pc.point(sig)))
            s = self._starts[i] + sig
            if best is None or d < best[1] - 1e-12 or (abs(d - best[1]) <= 1e-12 and s < best[0]):
                best = (s, d)
        s, d = best
        if self.boundary_fn(x) < 0:
            d = -d
        return float(s % self.boundary_length), float(d)

    def kg_integral(self, s0, s1):
        total = 0.0
        T = self.boundary_length
        # split [s0, s1] into whole turns plus a remainder
        span = s1 - s0
        turns = math.floor(span / T + 1e-15)
        total += turns * self._kg_total()
        a = s0 % T
        rem = span - turns * T
        b = a + rem
        for lo, hi in ((a, min(b, T)), (0.0, max(b - T, 0.0))):
            if hi <= lo:
                continue
            for i, pc in enumerate(self.pieces):
                ps, pe = self._starts[i], self._starts[i + 1]
                ov = min(hi, pe) - max(lo, ps)
                if ov > 0 and isinstance(pc, Arc):
                    total += ov / pc.radius
        return total

    def _kg_total(self):
        return sum(pc.length / pc.radius for pc in self.pieces if isinstance(pc, Arc))

    def corner_turns(self):
        """Turning angles concentrated at sharp corners (boundary arc-length, angle)."""
        out = []
        n = len(self.pieces)
        for i, pc in enumerate(self.pieces):
            t_end = pc.tangent_at(pc.length)
            t_next = self.pieces[(i + 1) % n].tangent_at(0.0)
            turn = math.atan2(t_end[0] * t_next[1] - t_end[1] * t_next[0], t_end @ t_next)
            if turn > 1e-12:
                out.append((float(self._starts[i + 1] % self.boundary_length), turn))
        return out

    def boundary_kg_min(self, n=1000):
        return min(pc.kg(0) for pc in self.pieces)

    def boundary_kg_max(self):
        if self.corner_turns():
            return math.inf
        return max(pc.kg(0) for pc in self.pieces)

    # geodesics
    def exp(self, x, v, t):
        return np.asarray(x, float) + t * np.asarray(v, float), np.asarray(v, float).copy()

    def flow_samples(self, x, v, ts):
        ts = np.asarray(ts, float)
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        return x[None, :] + ts[:, None] * v[None, :], np.repeat(v[None, :], len(ts), axis=0)

    def line_hits(self, p, w):
        hits = []
        for pc in self.pieces:
            hits.extend(pc.line_hits(p, w))
        return hits

    def exit_time(self, x, v, max_length):
        p = np.asarray(x[:2], float)
        w = _unit(np.asarray(v[:2], float))
        ts = [t for t in self.line_hits(p, w) if t > 1e-12]
        if not ts:
            return None
        t = min(ts)
        # discard grazing hits that do not leave the domain
        if self.boundary_fn(np.append(p + (t + 1e-7) * w, 0.0)) > 0:
            later = [u for u in ts if u > t + 1e-9]
            if not later:
                return None
            t = min(later)
        return t if t <= max_length else None

    def chord(self, p, w):
        """Intersection of the line p + t w with the domain, as (t_min, t_max)."""
        ts = self.line_hits(np.asarray(p, float), _unit(np.asarray(w, float)))
        if not ts:
            return None
        return min(ts), max(ts)

    def distance(self, x, y):
        return float(np.linalg.norm(np.asarray(y) - np.asarray(x)))

    def direction_to(self, x, y):
        d = np.asarray(y, float) - np.asarray(x, float)
        n = np.linalg.norm(d)
        return d / n if n > 0 else np.array([1.0, 0.0, 0.0])

    def planar(self, x):
        return np.array([x[0], x[1]], float)

    def potentials(self, x):
        return None

    def _compute_area(self):
        # exact: polygon of piece endpoints plus circular segments of arcs
        area = 0.0
        for pc in self.pieces:
            p0, p1 = pc.point(0.0), pc.point(pc.length)
            area += 0.5 * (p0[0] * p1[1] - p1[0] * p0[1])
            if isinstance(pc, Arc):
                th = pc.a1 - pc.a0
                area += 0.5 * pc.radius ** 2 * (th - math.sin(th))
        return area

    @property
    def diameter(self):
        return self._diameter

    @property
    def area(self):
        return self._area

    def epsilon(self):
        # chords of a convex planar domain are unique shortest paths at any length
        return 0.9 * 0.5 * self.diameter

    def to_json(self):
        return {"kind": self.kind, "params": dict(self._descriptor)}


class SphericalCap(SurfaceSpec):
    """Cap {phi <= phi1} of the round sphere of radius R; chart (phi, theta)."""

    kind = "SphericalCap"

    def __init__(self, radius=1.0, phi1=math.pi / 3):
        if not 0 < phi1 < math.pi / 2:
            raise ConfigInvalid("phi1 must lie in (0, pi/2) for a convex cap")
        self.R = float(radius)
        self.phi1 = float(phi1)
        self.K_max = 1.0 / self.R ** 2
        self.boundary_length = TWO_PI * self.R * math.sin(self.phi1)
        self._zcut = self.R * math.cos(self.phi1)

    def contains(self, coords):
        return -INSIDE_TOL <= coords[0] <= self.phi1 + INSIDE_TOL

    def embed(self, coords):
        ph, th = coords
        R = self.R
        return R * np.array([math.sin(ph) * math.cos(th), math.sin(ph) * math.sin(th), math.cos(ph)])

    def chart(self, x):
        rxy = math.hypot(x[0], x[1])
        return np.array([math.atan2(rxy, x[2]), math.atan2(x[1], x[0]) % TWO_PI])

    def chart_jacobian(self, coords):
        ph, th = coords
        R = self.R
        return R * np.array([
            [math.cos(ph) * math.cos(th), -math.sin(ph) * math.sin(th)],
            [math.cos(ph) * math.sin(th), math.sin(ph) * math.cos(th)],
            [-math.sin(ph), 0.0],
        ])

    def metric_at(self, coords):
        self.check(coords)
        return self.R ** 2 * np.diag([1.0, math.sin(coords[0]) ** 2])

    def christoffel_at(self, coords):
        self.check(coords)
        ph = coords[0]
        G = np.zeros((2, 2, 2))
        G[0, 1, 1] = -math.sin(ph) * math.cos(ph)
        G[1, 0, 1] = G[1, 1, 0] = math.cos(ph) / math.sin(ph)
        return G

    def gauss_curvature_at(self, coords):
        self.check(coords)
        return 1.0 / self.R ** 2

    def curvature_at_point(self, x):
        return self.K_max

    def normal(self, x):
        return np.asarray(x, float) / np.linalg.norm(x)

    def boundary_point(self, s):
        s = s % self.boundary_length
        th = s / (self.R * math.sin(self.phi1))
        x = self.embed((self.phi1, th))
        J = self.chart_jacobian((self.phi1, th))
        t = _unit(J[:, 1])
        nu = -_unit(J[:, 0])
        kg = math.cos(self.phi1) / (self.R * math.sin(self.phi1))
        return x, t, nu, kg

    def boundary_fn(self, x):
        return float(x[2]) - self._zcut

    def project_to_boundary(self, x):
        ph, th = self.chart(x)
        if math.hypot(x[0], x[1]) < 1e-15:
            th = 0.0
        return float(th * self.R * math.sin(self.phi1)), float(self.R * (self.phi1 - ph))

    def kg_integral(self, s0, s1):
        return (s1 - s0) * math.cos(self.phi1) / (self.R * math.sin(self.phi1))

    def boundary_kg_min(self, n=1000):
        return math.cos(self.phi1) / (self.R * math.sin(self.phi1))

    boundary_kg_max = boundary_kg_min

    def exp(self, x, v, t):
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        a = t / self.R
        return (x * math.cos(a) + self.R * v * math.sin(a),
                -x / self.R * math.sin(a) + v * math.cos(a))

    def flow_samples(self, x, v, ts):
        a = np.asarray(ts, float)[:, None] / self.R
        x = np.asarray(x, float)[None, :]
        v = np.asarray(v, float)[None, :]
        return (x * np.cos(a) + self.R * v * np.sin(a), -x / self.R * np.sin(a) + v * np.cos(a))

    def exit_time(self, x, v, max_length):
        # z(t) = z0 cos(t/R) + R vz sin(t/R) crosses R cos(phi1)
        A, B, c = float(x[2]), self.R * float(v[2]), self._zcut
        amp = math.hypot(A, B)
        if amp <= c:
            return None
        delta = math.atan2(B, A)
        base = math.acos(c / amp)
        cands = []
        for k in range(-1, 3):
            for sgn in (1.0, -1.0):
                tau = delta + sgn * base + k * TWO_PI
                if tau > 1e-12:
                    cands.append(tau)
        for tau in sorted(cands):
            # must be a downward crossing of z through the cut plane
            dz = -A * math.sin(tau) + B * math.cos(tau)
            if dz < 0:
                t = tau * self.R
                return t if t <= max_length else None
        return None

    def distance(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return self.R * math.atan2(np.linalg.norm(np.cross(x, y)), float(x @ y))

    def direction_to(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        w = y - (x @ y) / self.R ** 2 * x
        n = np.linalg.norm(w)
        if n < 1e-300:
            e1, _ = self.tangent_basis(x)
            return e1
        return w / n

    def planar(self, x):
        ph, th = self.chart(x)
        return self.R * ph * np.array([math.cos(th), math.sin(th)])

    def potentials(self, x):
        ph, th = self.chart(x)
        b = 1.0 - math.cos(ph)
        return th, self.R ** 2 * b, b

    @property
    def diameter(self):
        return 2 * self.R * self.phi1

    @property
    def area(self):
        return TWO_PI * self.R ** 2 * (1 - math.cos(self.phi1))

    def to_json(self):
        return {"kind": self.kind, "params": {"radius": self.R, "phi1": self.phi1}}


class SurfaceOfRevolution(SurfaceSpec):
    """Rotation of the profile r(u) about the u-axis, u in [0, u1].

    The profile is a sphere cap of radius ``cap_radius`` (r(0) = 0, infinite
    slope at the apex) joined C^1 to the line r = a u + b at the tangency
    point u0. The curvature jumps from 1/cap_radius^2 to 0 at u0.
    """

    kind = "SurfaceOfRevolution"

    def __init__(self, cap_radius=1.0, slope=0.2, u1=None, boundary_radius=None):
        rho, a = float(cap_radius), float(slope)
        if rho <= 0 or a <= 0:
            raise ConfigInvalid("cap_radius and slope must be positive")
        d = a * rho / math.sqrt(1 + a * a)
        self.rho_c = rho
        self.a = a
        self.u0 = rho - d
        self.r0 = math.sqrt(rho * rho - d * d)
        self.b = self.r0 - a * self.u0
        if u1 is None:
            if boundary_radius is None:
                raise ConfigInvalid("give u1 or boundary_radius")
            u1 = (float(boundary_radius) - self.b) / a
        self.u1 = float(u1)
        if self.u1 <= self.u0:
            raise ConfigInvalid("u1 must exceed the cap junction u0")
        self.params = np.array([rho, a, self.b, self.u0])
        self.K_max = 1.0 / rho ** 2
        self.r1 = self.r(self.u1)
        self.boundary_length = TWO_PI * self.r1
        self._sq = math.sqrt(1 + a * a)

    # profile
    def r(self, u):
        if u <= self.u0:
            return math.sqrt(max(2 * self.rho_c * u - u * u, 0.0))
        return self.a * u + self.b

    def dr(self, u):
        if u <= self.u0:
            return (self.rho_c - u) / self.r(u) if u > 0 else math.inf
        return self.a

    def ddr(self, u):
        if u <= self.u0:
            return -self.rho_c ** 2 / self.r(u) ** 3 if u > 0 else -math.inf
        return 0.0

    def meridian_length(self, u):
        """Arc length along a meridian from the apex to height u."""
        if u <= self.u0:
            return self.rho_c * math.acos(min(1.0, max(-1.0, 1 - u / self.rho_c)))
        return self.rho_c * math.acos(1 - self.u0 / self.rho_c) + (u - self.u0) * math.sqrt(1 + self.a ** 2)

    def meridian_u(self, m):
        m0 = self.meridian_length(self.u0)
        if m <= m0:
            return self.rho_c * (1 - math.cos(m / self.rho_c))
        return self.u0 + (m - m0) / math.sqrt(1 + self.a ** 2)

    # chart
    def contains(self, coords):
        return -INSIDE_TOL <= coords[0] <= self.u1 + INSIDE_TOL

    def embed(self, coords):
        u, th = coords
        r = self.r(u)
        return np.array([u, r * math.cos(th), r * math.sin(th)])

    def chart(self, x):
        return np.array([float(x[0]), math.atan2(x[2], x[1]) % TWO_PI])

    def chart_jacobian(self, coords):
        u, th = coords
        r, dr = self.r(u), self.dr(u)
        return np.array([[1.0, 0.0], [dr * math.cos(th), -r * math.sin(th)], [dr * math.sin(th), r * math.cos(th)]])

    def metric_at(self, coords):
        self.check(coords)
        u = coords[0]
        return np.diag([1 + self.dr(u) ** 2, self.r(u) ** 2])

    def christoffel_at(self, coords):
        self.check(coords)
        u = coords[0]
        r, dr, ddr = self.r(u), self.dr(u), self.ddr(u)
        G = np.zeros((2, 2, 2))
        G[0, 0, 0] = dr * ddr / (1 + dr * dr)
        G[0, 1, 1] = -r * dr / (1 + dr * dr)
        G[1, 0, 1] = G[1, 1, 0] = dr / r
        return G

    def gauss_curvature_at(self, coords):
        self.check(coords)
        return self.K_max if coords[0] <= self.u0 else 0.0

    def curvature_at_point(self, x):
        return self.K_max if x[0] <= self.u0 else 0.0

    def normal(self, x):
        _R, dR, _ = _ode.profile_R(float(x[0]), self.params)
        g = np.array([-dR, 2 * x[1], 2 * x[2]])
        return -g / np.linalg.norm(g)

    def boundary_point(self, s):
        s = s % self.boundary_length
        th = s / self.r1
        x = self.embed((self.u1, th))
        J = self.chart_jacobian((self.u1, th))
        t = _unit(J[:, 1])
        nu = -_unit(J[:, 0])
        kg = self.a / (self.r1 * self._sq)
        return x, t, nu, kg

    def boundary_fn(self, x):
        return self.u1 - float(x[0])

    def project_to_boundary(self, x):
        u, th = self.chart(x)
        if math.hypot(x[1], x[2]) < 1e-15:
            th = 0.0
        return float(th * self.r1), float(self.meridian_length(self.u1) - self.meridian_length(min(u, self.u1)))

    def kg_integral(self, s0, s1):
        return (s1 - s0) * self.a / (self.r1 * self._sq)

    def boundary_kg_min(self, n=1000):
        return self.a / (self.r1 * self._sq)

    boundary_kg_max = boundary_kg_min

    def _state(self, x, v):
        return np.concatenate([np.asarray(x, float), np.asarray(v, float)])

    def exp(self, x, v, t):
        y, _t, status = _ode.flow(self._state(x, v), t, self.params)
        if status < 0:
            from .errors import StepFailure
            raise StepFailure("integrator step size underflow")
        return y[:3].copy(), y[3:].copy()

    def flow_samples(self, x, v, ts):
        Y = _ode.flow_samples(self._state(x, v), ts, self.params)
        if np.isnan(Y).any():
            from .errors import StepFailure
            raise StepFailure("integrator step size underflow")
        return Y[:, :3].copy(), Y[:, 3:].copy()

    def exit_time(self, x, v, max_length):
        y, t, status = _ode.flow_until(self._state(x, v), max_length, self.params, self.u1)
        if status == 1:
            return t
        if status < 0:
            from .errors import StepFailure
            raise StepFailure("integrator step size underflow")
        return None

    def planar(self, x):
        u, th = self.chart(x)
        m = self.meridian_length(max(u, 0.0))
        return m * np.array([math.cos(th), math.sin(th)])

    def _area_potential(self, u):
        rc, a, b, u0 = self.rho_c, self.a, self.b, self.u0
        if u <= u0:
            return rc * u  # rc^2 (1 - cos psi) with 1 - cos psi = u / rc
        return rc * u0 + self._sq * (a * (u * u - u0 * u0) / 2 + b * (u - u0))

    def _curv_potential(self, u):
        if u <= self.u0:
            return u / self.rho_c
        return 1 - self.a / self._sq

    def potentials(self, x):
        u, th = self.chart(x)
        u = max(float(u), 0.0)
        return th, self._area_potential(u), self._curv_potential(u)

    @property
    def diameter(self):
        return 2 * self.meridian_length(self.u1)

    @property
    def area(self):
        return TWO_PI * self._area_potential(self.u1)

    def to_json(self):
        return {"kind": self.kind, "params": {"cap_radius": self.rho_c, "slope": self.a, "u1": self.u1}}


# ---------------------------------------------------------------------------
# module-level API


def from_json(desc: dict) -> SurfaceSpec:
    """Build a surface from ``{"kind": ..., "params": {...}}``."""
    try:
        kind = desc["kind"]
        params = dict(desc.get("params", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigInvalid(f"bad surface descriptor: {desc!r}") from exc
    if kind == "FlatConvexDomain":
        shape = params.pop("shape", "disk")
        if shape == "disk":
            return FlatConvexDomain.disk(params.get("radius", 1.0), tuple(params.get("center", (0.0, 0.0))))
        if shape == "polygon":
            return FlatConvexDomain.polygon(params["vertices"], params.get("rho", 0.0))
        if shape == "sector":
            return FlatConvexDomain.sector(params["angle"], params.get("radius", 1.0), params.get("rho", 0.0))
        if shape == "equilateral":
            return FlatConvexDomain.equilateral(params.get("area", 1.0), params.get("rho", 0.0))
        raise ConfigInvalid(f"unknown flat shape {shape!r}")
    if kind == "SphericalCap":
        return SphericalCap(params.get("radius", 1.0), params.get("phi1", math.pi / 3))
    if kind == "SurfaceOfRevolution":
        return SurfaceOfRevolution(params.get("cap_radius", 1.0), params.get("slope", 0.2),
                                   params.get("u1"), params.get("boundary_radius"))
    raise ConfigInvalid(f"unknown surface kind {kind!r}")


def metric_at(surface: SurfaceSpec, p) -> np.ndarray:
    return surface.metric_at(p)


def christoffel_at(surface: SurfaceSpec, p) -> np.ndarray:
    """Gamma[k, i, j] = Christoffel symbol of the second kind."""
    return surface.christoffel_at(p)


def gauss_curvature_at(surface: SurfaceSpec, p) -> float:
    return surface.gauss_curvature_at(p)


@dataclass
class BoundarySample:
    point: np.ndarray      # chart coordinates
    tangent: np.ndarray    # chart components, unit in the metric
    normal: np.ndarray     # inward, chart components
    kg: float
    ambient: tuple = field(repr=False, default=())


def boundary_eval(surface: SurfaceSpec, s: float) -> BoundarySample:
    x, t, nu, kg = surface.boundary_point(s)
    c = surface.chart(x)
    return BoundarySample(c, surface.vector_to_chart(x, t), surface.vector_to_chart(x, nu), kg, (x, t, nu))


def project_to_boundary(surface: SurfaceSpec, p):
    """(s*, d) for a chart point p."""
    surface.check(p)
    return surface.project_to_boundary(surface.embed(p))


def convexity_report(surface: SurfaceSpec, n: int = 1000) -> dict:
    """Sampled boundary k_g minimum and whether the boundary is strictly convex."""
    kmin = surface.boundary_kg_min(n)
    corners = surface.corner_turns() if isinstance(surface, FlatConvexDomain) else []
    return {"kg_min": kmin, "strict": kmin > 0 and not corners, "sharp_corners": len(corners)}
