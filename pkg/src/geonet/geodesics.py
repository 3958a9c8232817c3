"""Geodesic shooting, two-point and point-to-boundary problems, free boundary
geodesics, boundary geodesic loops and the normal second variation.

Public functions take chart coordinates; the ``*_ambient`` helpers work with
embedded points ``x`` and unit tangent vectors ``v`` in R^3 and are what the
other modules build on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import NoConvergence, NoLoopFound, NotFreeBoundary, PathLeavesDomain
from .surfaces import SurfaceSpec, SurfaceOfRevolution, _unit

SAMPLE_SPACING = 1e-2
ORTHO_TOL = 1e-6


@dataclass
class GeodesicPath:
    """Geodesic sampled at uniform arc-length spacing (ambient coordinates)."""

    surface: SurfaceSpec = field(repr=False)
    points: np.ndarray
    velocities: np.ndarray
    length: float

    @property
    def start(self):
        return self.surface.chart(self.points[0])

    @property
    def end(self):
        return self.surface.chart(self.points[-1])

    @property
    def initial_velocity(self):
        return self.velocities[0]

    @property
    def end_velocity(self):
        return self.velocities[-1]

    @property
    def spacing(self):
        return self.length / max(len(self.points) - 1, 1)

    @property
    def samples(self):
        return np.array([self.surface.chart(p) for p in self.points])

    def reversed(self):
        return GeodesicPath(self.surface, self.points[::-1].copy(), -self.velocities[::-1], self.length)

    def to_json(self):
        return {"samples": self.samples.tolist(), "length": self.length}


@dataclass
class ShootResult:
    path: GeodesicPath
    hit_boundary: bool
    s_exit: float | None = None
    angle: float | None = None

    @property
    def exit(self):
        if self.hit_boundary:
            return ("HitBoundary", self.s_exit, self.angle)
        return ("ReachedLength",)


@dataclass
class BoundaryLoop:
    vertex_s: float
    path: GeodesicPath
    angles: tuple
    closure_gap: float
    asymmetry: float


# ---------------------------------------------------------------------------
# ambient building blocks


def sample_path(surface, x, v, length, spacing=SAMPLE_SPACING, n=None):
    if n is None:
        n = max(17, int(math.ceil(length / spacing)) + 1)
    ts = np.linspace(0.0, length, n)
    P, V = surface.flow_samples(x, v, ts)
    P[0] = x
    return GeodesicPath(surface, np.asarray(P), np.asarray(V), float(length))


def boundary_angle(surface, s, v_arrive):
    """Angle in (0, pi) between the inward reversed arrival velocity and the boundary tangent."""
    _x, t, _nu, _k = surface.boundary_point(s)
    return math.acos(max(-1.0, min(1.0, float(-v_arrive @ t))))


def shoot_ambient(surface, x, v, max_length, spacing=SAMPLE_SPACING):
    t_exit = surface.exit_time(x, v, max_length)
    if t_exit is None:
        return ShootResult(sample_path(surface, x, v, max_length, spacing), False)
    path = sample_path(surface, x, v, t_exit, spacing)
    s_exit, _d = surface.project_to_boundary(path.points[-1])
    return ShootResult(path, True, s_exit, boundary_angle(surface, s_exit, path.end_velocity))


def _exp_residual(surface, x, e1, e2, ang, ell, y):
    v = math.cos(ang) * e1 + math.sin(ang) * e2
    return surface.exp(x, v, ell)[0] - y


def _newton_connect(surface, x, y, ang, ell, tol=1e-13, max_iter=40):
    e1, e2 = surface.tangent_basis(x)
    F = _exp_residual(surface, x, e1, e2, ang, ell, y)
    for _ in range(max_iter):
        nf = np.linalg.norm(F)
        if nf < tol:
            break
        hA, hL = 1e-7, 1e-7 * max(ell, 1e-3)
        J = np.column_stack([
            (_exp_residual(surface, x, e1, e2, ang + hA, ell, y) - F) / hA,
            (_exp_residual(surface, x, e1, e2, ang, ell + hL, y) - F) / hL,
        ])
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        # damped update keeps the length positive
        lam = 1.0
        while lam > 1e-4:
            a2, l2 = ang + lam * step[0], ell + lam * step[1]
            if l2 > 0:
                F2 = _exp_residual(surface, x, e1, e2, a2, l2, y)
                if np.linalg.norm(F2) < nf:
                    ang, ell, F = a2, l2, F2
                    break
            lam *= 0.5
        else:
            break
    v = math.cos(ang) * e1 + math.sin(ang) * e2
    return v, ell, float(np.linalg.norm(F))


def _energy_polyline(surface, x, y, n=64):
    """Discrete energy minimization of an n-point chart polyline from x to y."""
    cx, cy = surface.chart(x), surface.chart(y)
    if isinstance(surface, SurfaceOfRevolution):
        dth = (cy[1] - cx[1] + math.pi) % (2 * math.pi) - math.pi
        cy = np.array([cy[0], cx[1] + dth])
    init = np.linspace(cx, cy, n)[1:-1].ravel()

    def energy(z):
        pts = np.vstack([cx, z.reshape(-1, 2), cy])
        X = np.array([surface.embed(p) for p in pts])
        return float(((X[1:] - X[:-1]) ** 2).sum())

    res = optimize.minimize(energy, init, method="L-BFGS-B")
    pts = np.vstack([cx, res.x.reshape(-1, 2), cy])
    X = np.array([surface.embed(p) for p in pts])
    return X


def connect_ambient(surface, x, y):
    """Initial unit velocity and length of the shortest geodesic from x to y."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    d = surface.distance(x, y)
    if d is not None:
        return surface.direction_to(x, y), d
    chord = y - x
    ell = float(np.linalg.norm(chord))
    if ell < 1e-15:
        e1, _ = surface.tangent_basis(x)
        return e1, 0.0
    e1, e2 = surface.tangent_basis(x)
    w = surface.to_tangent(x, chord)
    ang = math.atan2(float(w @ e2), float(w @ e1))
    v, L, res = _newton_connect(surface, x, y, ang, ell)
    if res < 1e-9:
        return v, L
    X = _energy_polyline(surface, x, y)
    w = surface.to_tangent(x, X[1] - X[0])
    ang = math.atan2(float(w @ e2), float(w @ e1))
    ell = float(np.linalg.norm(np.diff(X, axis=0), axis=1).sum())
    v, L, res = _newton_connect(surface, x, y, ang, ell)
    if res < 1e-9:
        return v, L
    raise NoConvergence(f"connect failed, residual {res:.3e}")


def drop_ambient(surface, x):
    """(foot parameter s*, initial velocity, length) of the shortest drop to the boundary."""
    s, d = surface.project_to_boundary(x)
    foot, _t, nu, _k = surface.boundary_point(s)
    if d < 1e-14:
        return s, -nu, 0.0
    w = surface.to_tangent(x, foot - x)
    if np.linalg.norm(w) < 1e-14:
        w = -nu
    return s, _unit(w), d


# ---------------------------------------------------------------------------
# public operations (chart coordinates)


def _tangent_from_chart(surface, p, w):
    x = surface.embed(p)
    v = surface.vector_from_chart(p, w)
    return x, v


def shoot(surface: SurfaceSpec, p, w, max_length: float) -> ShootResult:
    """Integrate the geodesic from chart point p with unit chart velocity w."""
    surface.check(p)
    x, v = _tangent_from_chart(surface, p, w)
    nv = np.linalg.norm(v)
    if abs(nv - 1.0) > 1e-9:
        raise ValueError(f"initial velocity has metric norm {nv}, expected 1")
    return shoot_ambient(surface, x, v / nv, max_length)


def path_between(surface, x, y, spacing=SAMPLE_SPACING):
    v, L = connect_ambient(surface, x, y)
    path = sample_path(surface, x, v, L, spacing)
    path.points[-1] = y
    return path


def connect(surface: SurfaceSpec, p, q, spacing=SAMPLE_SPACING) -> GeodesicPath:
    surface.check(p)
    surface.check(q)
    x, y = surface.embed(p), surface.embed(q)
    path = path_between(surface, x, y, spacing)
    if min(surface.boundary_fn(pt) for pt in path.points) < -1e-9:
        raise PathLeavesDomain("shortest geodesic leaves the domain")
    return path


def drop_to_boundary(surface: SurfaceSpec, p, spacing=SAMPLE_SPACING) -> GeodesicPath:
    surface.check(p)
    x = surface.embed(p)
    s, v, d = drop_ambient(surface, x)
    path = sample_path(surface, x, v, d, spacing)
    path.points[-1] = surface.boundary_point(s)[0]
    return path


def _launch(surface, s, psi):
    x, t, nu, _k = surface.boundary_point(s)
    return x, math.cos(psi) * t + math.sin(psi) * nu


def free_boundary_residuals(surface, path: GeodesicPath):
    """(start residual, end residual): |<velocity, boundary tangent>| at both ends."""
    s0, _ = surface.project_to_boundary(path.points[0])
    s1, _ = surface.project_to_boundary(path.points[-1])
    t0 = surface.boundary_point(s0)[1]
    t1 = surface.boundary_point(s1)[1]
    return abs(float(path.initial_velocity @ t0)), abs(float(path.end_velocity @ t1))


def find_free_boundary_geodesic(surface: SurfaceSpec, seed=(0.0, math.pi / 2), tol=1e-12,
                                max_iter=50) -> GeodesicPath:
    """Newton on (s, launch angle) so that both ends meet the boundary orthogonally."""
    s, psi = float(seed[0]), float(seed[1])
    if not 0 < psi < math.pi:
        raise ValueError("seed angle must lie in (0, pi)")
    max_len = 4 * surface.diameter + surface.boundary_length

    def residual(z):
        x, v = _launch(surface, z[0], z[1])
        t_exit = surface.exit_time(x, v, max_len)
        if t_exit is None:
            raise NoConvergence("launched geodesic never reaches the boundary")
        xe, ve = surface.exp(x, v, t_exit)
        se, _ = surface.project_to_boundary(xe)
        return np.array([math.cos(z[1]), float(ve @ surface.boundary_point(se)[1])])

    z = np.array([s, psi])
    F = residual(z)
    for _ in range(max_iter):
        if np.abs(F).max() < tol:
            break
        h = 1e-7
        J = np.column_stack([(residual(z + h * e) - F) / h for e in np.eye(2)])
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            z2 = z + lam * step
            z2[1] = min(max(z2[1], 1e-6), math.pi - 1e-6)
            try:
                F2 = residual(z2)
            except NoConvergence:
                F2 = None
            if F2 is not None and np.abs(F2).max() < np.abs(F).max():
                z, F = z2, F2
                break
            lam *= 0.5
        else:
            break
    if np.abs(F).max() > ORTHO_TOL:
        raise NoConvergence(f"free boundary residual {np.abs(F).max():.3e}")
    x, v = _launch(surface, z[0] % surface.boundary_length, z[1])
    return shoot_ambient(surface, x, v, max_len, spacing=SAMPLE_SPACING).path


def _wrap(ds, T):
    return (ds + T / 2) % T - T / 2


def _loop_eval(surface, s, psi, max_len):
    x, v = _launch(surface, s, psi)
    t_exit = surface.exit_time(x, v, max_len)
    if t_exit is None:
        return None
    xe, ve = surface.exp(x, v, t_exit)
    se, _ = surface.project_to_boundary(xe)
    T = surface.boundary_length
    t_b = surface.boundary_point(s)[1]
    return {
        "gap": _wrap(se - s, T),
        "dist": float(np.linalg.norm(xe - x)),
        "asym": float((v - ve) @ t_b),  # v1 + v2 with v2 = -ve
        "length": t_exit,
        "v": v,
        "ve": ve,
    }


def find_boundary_geodesic_loop(surface: SurfaceSpec, seed_s: float = 0.0, n_sweep: int = 721,
                                tol=1e-10) -> BoundaryLoop:
    """Geodesic loop with vertex on the boundary making equal angles with it."""
    T = surface.boundary_length
    max_len = 4 * surface.diameter + T
    psis = np.linspace(0, math.pi, n_sweep + 2)[1:-1]
    vals = [_loop_eval(surface, seed_s, p, max_len) for p in psis]
    cands = []
    for i in range(len(psis) - 1):
        a, b = vals[i], vals[i + 1]
        if a is None or b is None:
            continue
        if a["gap"] * b["gap"] <= 0 and abs(a["gap"]) < T / 4 and abs(b["gap"]) < T / 4:
            cands.append((psis[i], psis[i + 1]))
    for lo, hi in cands:
        f = lambda p: _loop_eval(surface, seed_s, p, max_len)["gap"]
        try:
            psi = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except ValueError:
            continue
        s = seed_s
        ev = _loop_eval(surface, s, psi, max_len)
        if abs(ev["asym"]) > ORTHO_TOL or ev["dist"] > 1e-8:
            # 2-D Newton on (vertex, angle) with residuals (closure, asymmetry)
            z = np.array([s, psi])
            for _ in range(40):
                ev = _loop_eval(surface, z[0], z[1], max_len)
                F = np.array([ev["gap"], ev["asym"]])
                if np.abs(F).max() < tol:
                    break
                h = 1e-7
                cols = []
                for e in np.eye(2):
                    e2 = _loop_eval(surface, *(z + h * e), max_len)
                    cols.append((np.array([e2["gap"], e2["asym"]]) - F) / h)
                z = z + np.linalg.lstsq(np.column_stack(cols), -F, rcond=None)[0]
            s, psi = z[0] % T, z[1]
            ev = _loop_eval(surface, s, psi, max_len)
        if ev["dist"] > 1e-8:
            continue
        x, v = _launch(surface, s, psi)
        path = sample_path(surface, x, v, ev["length"])
        path.points[-1] = x
        t_b = surface.boundary_point(s)[1]
        a1 = math.acos(max(-1.0, min(1.0, float(v @ t_b))))
        a2 = math.acos(max(-1.0, min(1.0, float(ev["ve"] @ t_b))))
        return BoundaryLoop(s, path, (a1, a2), ev["dist"], abs(ev["asym"]))
    raise NoLoopFound("no closing launch angle at the seed vertex")


def curvature_integral(surface, path: GeodesicPath) -> float:
    """Integral of Gaussian curvature along the geodesic."""
    if surface.K_max == 0:
        return 0.0
    x0, v0 = path.points[0], path.initial_velocity
    if isinstance(surface, SurfaceOfRevolution):
        # K is 1/rho_c^2 on the cap (u <= u0) and 0 on the cone: measure cap time
        u0 = surface.u0
        us = path.points[:, 0] - u0
        ts = np.linspace(0, path.length, len(path.points))
        cuts = [0.0]
        for i in range(len(us) - 1):
            if us[i] * us[i + 1] < 0:
                f = lambda t: surface.exp(x0, v0, t)[0][0] - u0
                cuts.append(optimize.brentq(f, ts[i], ts[i + 1], xtol=1e-15))
        cuts.append(path.length)
        inside = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            mid = surface.exp(x0, v0, 0.5 * (a + b))[0]
            if mid[0] <= u0:
                inside += b - a
        return inside * surface.K_max
    if hasattr(surface, "R"):
        return path.length / surface.R ** 2
    val, _err = integrate.quad(
        lambda t: surface.curvature_at_point(surface.exp(x0, v0, t)[0]), 0, path.length, limit=200)
    return val


def second_variation_normal(surface: SurfaceSpec, path: GeodesicPath) -> float:
    """-k_g(start) - k_g(end) - integral of K along a free boundary geodesic."""
    ends_ok = all(abs(surface.boundary_fn(x)) < 1e-8 for x in (path.points[0], path.points[-1]))
    r0, r1 = free_boundary_residuals(surface, path)
    if not ends_ok or max(r0, r1) > ORTHO_TOL:
        raise NotFreeBoundary(f"ends on boundary: {ends_ok}, orthogonality residuals {r0:.2e}, {r1:.2e}")
    s0, _ = surface.project_to_boundary(path.points[0])
    s1, _ = surface.project_to_boundary(path.points[-1])
    k0 = surface.boundary_point(s0)[3]
    k1 = surface.boundary_point(s1)[3]
    return -k0 - k1 - curvature_integral(surface, path)


def path_from_samples(surface: SurfaceSpec, samples) -> GeodesicPath:
    """Rebuild a geodesic path from chart samples, re-deriving exact end tangents."""
    pts = np.array([surface.embed(p) for p in samples])
    if len(pts) < 2:
        raise ValueError("a path needs at least two samples")
    v0, _ = connect_ambient(surface, pts[0], pts[1])
    v1, _ = connect_ambient(surface, pts[-1], pts[-2])
    seg = [connect_ambient(surface, pts[i], pts[i + 1])[1] for i in range(len(pts) - 1)]
    L = float(np.sum(seg))
    vel = np.empty_like(pts)
    for i in range(len(pts) - 1):
        vel[i] = v0 if i == 0 else _unit(surface.to_tangent(pts[i], pts[i + 1] - pts[i - 1]))
    vel[-1] = -v1
    return GeodesicPath(surface, pts, vel, L)
