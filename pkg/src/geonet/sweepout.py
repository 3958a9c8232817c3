"""Sweepout constructions and the width functionals evaluated on them."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .birkhoff import BrokenGeodesic, homotopy_extract, shorten_run, _segments
from .cycles import Cycle, CycleCurve, Sweepout, concatenate
from .errors import NUnreachable, NotFlat, PreconditionUnverified, WrongSurfaceKind
from .geodesics import connect_ambient
from .network import (GeodesicNetwork, check_stationarity, extract_faces, w1_violations,
                      w2_violations, w3_violations)
from .surfaces import Arc, FlatConvexDomain, SurfaceOfRevolution, SurfaceSpec

GRID = 64


# ---------------------------------------------------------------------------
# width functionals


def _clip_lengths(C, A, B, r):
    """Length of each segment A_k B_k inside each disk B(C_m, r); shape (M, K)."""
    d = B - A
    L = np.sqrt((d ** 2).sum(-1))
    ok = L > 0
    f = A[None, :, :] - C[:, None, :]
    a = np.where(ok, L ** 2, 1.0)[None, :]
    b = (f * d[None, :, :]).sum(-1)
    c = (f ** 2).sum(-1) - r * r
    disc = b * b - a * c
    sq = np.sqrt(np.maximum(disc, 0.0))
    t0 = np.clip((-b - sq) / a, 0.0, 1.0)
    t1 = np.clip((-b + sq) / a, 0.0, 1.0)
    return np.where((disc > 0) & ok[None, :], (t1 - t0) * L[None, :], 0.0)


def _frame_segments(surface, cycle):
    segs_a, segs_b = [], []
    for cv in cycle.curves:
        P = cv.points
        if len(P) < 2:
            continue
        A, B = P[:-1], P[1:]
        # drop pieces lying on the boundary: the relative mass ignores them
        mid = 0.5 * (A + B)
        on_b = np.array([abs(surface.boundary_fn(a)) < 1e-9 and abs(surface.boundary_fn(b)) < 1e-9
                         and abs(surface.boundary_fn(m)) < 1e-9 for a, b, m in zip(A, B, mid)])
        segs_a.append(A[~on_b])
        segs_b.append(B[~on_b])
    if not segs_a:
        return np.empty((0, 3)), np.empty((0, 3))
    return np.vstack(segs_a), np.vstack(segs_b)


def _grid_centers(surface):
    if not isinstance(surface, FlatConvexDomain):
        return np.empty((0, 3))
    T = surface.boundary_length
    pts = np.array([surface.boundary_point(s)[0] for s in np.linspace(0, T, 256, endpoint=False)])
    lo, hi = pts.min(0), pts.max(0)
    gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], GRID), np.linspace(lo[1], hi[1], GRID))
    G = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)])
    return G[[surface.boundary_fn(g) >= 0 for g in G]]


def concentration(surface, sweepout: Sweepout, r: float) -> float:
    """Largest curve length any frame puts in a ball of radius r, boundary pieces excluded.

    Centers are a 64 x 64 grid (flat domains) plus the frame's own sample
    points, so the value is a lower estimate of the supremum.  Flat domains
    clip segments against disks exactly; curved surfaces count sample pieces
    whose midpoint lies within r (ambient chord distance for the surface
    of revolution, which can only enlarge the ball).
    """
    grid = _grid_centers(surface)
    best = 0.0
    flat = isinstance(surface, FlatConvexDomain)
    for _t, cyc in sweepout.frames:
        A, B = _frame_segments(surface, cyc)
        if not len(A):
            continue
        C = np.vstack([grid, A, B[-1:]])
        if flat:
            val = _clip_lengths(C[:, :2], A[:, :2], B[:, :2], r).sum(1).max()
        else:
            M = 0.5 * (A + B)
            seg_len = np.array([_arc_len(surface, a, b) for a, b in zip(A, B)])
            D = _distances(surface, C, M)
            val = ((D < r) * seg_len[None, :]).sum(1).max()
        best = max(best, float(val))
    return best


def _arc_len(surface, a, b):
    d = surface.distance(a, b)
    return float(np.linalg.norm(b - a)) if d is None else d


def _distances(surface, C, M):
    if hasattr(surface, "R") and not isinstance(surface, SurfaceOfRevolution):
        u = C / surface.R
        w = M / surface.R
        return surface.R * np.arccos(np.clip(u @ w.T, -1.0, 1.0))
    return np.sqrt(((C[:, None, :] - M[None, :, :]) ** 2).sum(-1))


def width_report(surface: SurfaceSpec, sweepout: Sweepout, r: float):
    """(max mass over frames, concentration at radius r)."""
    if not sweepout.frames:
        raise ValueError("sweepout has no frames")
    return sweepout.max_mass, concentration(surface, sweepout, r)


def relative_mass(surface, cycle: Cycle) -> float:
    """Mass of the part of a cycle not lying on the boundary."""
    A, B = _frame_segments(surface, cycle)
    if not len(A):
        return 0.0
    lengths = [cv.length for cv in cycle.curves]
    raw = sum(float(np.linalg.norm(cv.points[1:] - cv.points[:-1], axis=1).sum()) for cv in cycle.curves
              if len(cv.points) > 1)
    kept = float(np.linalg.norm(B - A, axis=1).sum())
    return sum(lengths) * (kept / raw if raw > 0 else 0.0)


# ---------------------------------------------------------------------------
# parallel sweepouts of flat domains


def _support(surface: FlatConvexDomain, d):
    """(min, max) of x . d over the domain."""
    vals = []
    for pc in surface.pieces:
        vals.append(pc.point(0.0) @ d)
        vals.append(pc.point(pc.length) @ d)
        if isinstance(pc, Arc):
            ang = math.atan2(d[1], d[0])
            for a in (ang, ang + math.pi):
                a2 = pc.a0 + (a - pc.a0) % (2 * math.pi)
                if a2 <= pc.a1:
                    vals.append(pc.center @ d + pc.radius * math.cos(a2 - ang))
    return min(vals), max(vals)


def _chord(surface, d, n, c):
    p = c * d
    span = surface.chord(p, n)
    if span is None or span[1] <= span[0]:
        return None
    t0, t1 = span
    return p + t0 * n, p + t1 * n


def chord_length(surface, d, c):
    n = np.array([-d[1], d[0]])
    ch = _chord(surface, d, n, c)
    return 0.0 if ch is None else float(np.linalg.norm(ch[1] - ch[0]))


def max_parallel_chord(surface: FlatConvexDomain, direction):
    """(offset, length) of the longest chord orthogonal to ``direction``."""
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    lo, hi = _support(surface, d)
    # chord length is concave in the offset for a convex domain: one bounded search suffices
    res = optimize.minimize_scalar(lambda c: -chord_length(surface, d, c), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    return float(res.x), float(-res.fun)


def parallel_sweepout(surface: SurfaceSpec, direction, n_frames: int = 256) -> Sweepout:
    """Chords orthogonal to ``direction``, advancing along it from one support line to the other."""
    if not isinstance(surface, FlatConvexDomain):
        raise NotFlat("parallel sweepouts need a flat domain")
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    n = np.array([-d[1], d[0]])
    lo, hi = _support(surface, d)
    c_star, _ = max_parallel_chord(surface, d)
    cs = np.union1d(np.linspace(lo, hi, n_frames), [c_star])
    frames = []
    for c in cs:
        t = (c - lo) / (hi - lo)
        ch = _chord(surface, d, n, c)
        if ch is None or c in (lo, hi):
            # support line: the frame degenerates to the contact point (or contact edge)
            x = _contact(surface, d, c)
            frames.append((float(t), Cycle([CycleCurve.point(x)]) if ch is None or np.linalg.norm(ch[1] - ch[0]) < 1e-9
                           else Cycle([_seg_curve(*ch)])))
            continue
        frames.append((float(t), Cycle([_seg_curve(*ch)])))
    return Sweepout(frames, "parallel", {"direction": d[:2].tolist(), "max_offset": c_star})


def _contact(surface, d, c):
    T = surface.boundary_length
    ss = np.linspace(0, T, 4096, endpoint=False)
    pts = np.array([surface.boundary_point(s)[0] for s in ss])
    return pts[np.argmin(np.abs(pts[:, :2] @ d - c))]


def _seg_curve(a, b):
    a3 = np.array([a[0], a[1], 0.0])
    b3 = np.array([b[0], b[1], 0.0])
    return CycleCurve(np.vstack([a3, b3]), float(np.linalg.norm(b3 - a3)))


def min_max_direction(surface: FlatConvexDomain, n_grid: int = 90):
    """Direction angle in [0, pi) minimizing the longest parallel chord: grid then golden section."""
    f = lambda a: max_parallel_chord(surface, (math.cos(a), math.sin(a)))[1]
    angs = np.linspace(0, math.pi, n_grid, endpoint=False)
    vals = np.array([f(a) for a in angs])
    k = int(np.argmin(vals))
    step = math.pi / n_grid
    try:
        res = optimize.minimize_scalar(f, bracket=(angs[k] - step, angs[k], angs[k] + step),
                                       method="golden", tol=1e-10)
    except ValueError:
        # flat spot on the grid: fall back to a bounded search around it
        res = optimize.minimize_scalar(f, bounds=(angs[k] - step, angs[k] + step), method="bounded",
                                       options={"xatol": 1e-10})
    if res.fun > vals[k]:
        return float(angs[k]), float(vals[k])
    return float(res.x) % math.pi, float(res.fun)


# ---------------------------------------------------------------------------
# surfaces of revolution


def rotational_sweepout(surface: SurfaceSpec, n_frames: int = 256, n_theta: int = 128) -> Sweepout:
    """Latitude circles from the boundary down to the apex."""
    if not isinstance(surface, SurfaceOfRevolution):
        raise WrongSurfaceKind("rotational sweepouts need a surface of revolution")
    us = np.linspace(surface.u1, 0.0, n_frames)
    th = np.linspace(0.0, 2 * math.pi, n_theta + 1)
    frames = []
    for k, u in enumerate(us):
        t = k / (n_frames - 1)
        if u <= 0:
            frames.append((t, Cycle([CycleCurve.point(surface.embed((0.0, 0.0)))])))
            continue
        P = np.array([surface.embed((u, a)) for a in th])
        frames.append((t, Cycle([CycleCurve(P, 2 * math.pi * float(surface.r(u)), True)])))
    return Sweepout(frames, "rotational", {"u1": surface.u1})


# ---------------------------------------------------------------------------
# networks


def classify_segments(net: GeodesicNetwork, faces, I, J):
    """Split segment indices into O (odd), E_I (even, between I-faces) and E_J (other even)."""
    side = {}
    for f, face in enumerate(faces):
        for i, fwd in face.segment_sides():
            side[(i, fwd)] = f
    Iset = set(I)
    O, EI, EJ = [], [], []
    for i, (_p, m) in enumerate(net.segments):
        if m % 2:
            O.append(i)
        elif side.get((i, True)) in Iset and side.get((i, False)) in Iset:
            EI.append(i)
        else:
            EJ.append(i)
    return O, EI, EJ


def faces_sweepout_bound(net: GeodesicNetwork, decomposition, faces=None, tol: float = 1e-8) -> float:
    """max(sum_O L + 2 sum_{E_I} L, sum_O L + 2 sum_{E_J} L) for a network meeting the hypotheses."""
    reports = check_stationarity(net, tol)
    problems = []
    if not all(r.passed for r in reports):
        problems.append("stationarity")
    if w1_violations(reports):
        problems.append("w1")
    if w2_violations(reports):
        problems.append("w2")
    if w3_violations(net):
        problems.append("w3")
    if problems:
        raise PreconditionUnverified("unverified hypotheses: " + ", ".join(problems))
    if faces is None:
        faces, net2 = extract_faces(net, split=False)
    I, J = decomposition[0], decomposition[1]
    O, EI, EJ = classify_segments(net, faces, I, J)
    L = [p.length for p, _m in net.segments]
    lo = sum(L[i] for i in O)
    return float(max(lo + 2 * sum(L[i] for i in EI), lo + 2 * sum(L[i] for i in EJ)))


# ---------------------------------------------------------------------------
# inscribed broken geodesic


def _subdivided(surface, nodes, m, closed):
    """Broken geodesic through the nodes with each geodesic piece cut into m equal parts."""
    vel, lens = _segments(surface, nodes)
    verts = []
    for x, v, ell in zip(nodes[:-1], vel, lens):
        P, _V = surface.flow_samples(x, v, np.linspace(0, ell, m + 1)[:-1])
        P = np.asarray(P)
        P[0] = x
        verts.extend(P)
    verts.append(nodes[-1])
    V = np.array(verts)
    vel2, lens2 = _segments(surface, V)
    return BrokenGeodesic(V, vel2, lens2, closed, not closed, len(lens2) * surface.epsilon())


def inscribed_polygon_sweepout(surface: SurfaceSpec, n: int, frames_per_lune: int = 16,
                               inner_frames: int = 64, max_iter: int = 4000):
    """Sweepout through the inscribed broken geodesic on n equally spaced boundary points.

    Returns (sweepout, bound) with bound = length of the inscribed curve.
    """
    if n < 3:
        raise NUnreachable("need at least three boundary points")
    T = surface.boundary_length
    P = np.array([surface.boundary_point(i * T / n)[0] for i in range(n)])
    eps = surface.epsilon()
    chords = [connect_ambient(surface, P[i], P[(i + 1) % n]) for i in range(n)]
    lens = [c[1] for c in chords]
    if max(lens) > eps:
        raise NUnreachable(f"chord {max(lens):.4g} exceeds the segment bound {eps:.4g}; increase n")
    bound = float(sum(lens))
    chord_curves = []
    for i, (v, ell) in enumerate(chords):
        X, _V = surface.flow_samples(P[i], v, np.linspace(0, ell, 17))
        X = np.asarray(X)
        X[0], X[-1] = P[i], P[(i + 1) % n]
        chord_curves.append(CycleCurve(X, ell))
    parts = []
    # lunes between each chord and its boundary arc: the reversed homotopy grows the chord
    for i in range(n):
        sigma = _subdivided(surface, np.array([P[i], P[(i + 1) % n]]), 4, closed=False)
        out = shorten_run(surface, sigma, max_iter=max_iter)
        fam = homotopy_extract(surface, out, frames_per_lune).reversed()
        done = chord_curves[:i]
        frames = [(t, Cycle(list(done) + c.curves)) for t, c in fam.frames]
        frames[-1] = (1.0, Cycle(list(done) + [chord_curves[i]]))
        parts.append(Sweepout(frames, "lune"))
    # the inner region: shrink the closed broken geodesic to a point
    ring = np.vstack([P, P[:1]])
    m = 2 if n % 2 else 1
    sigma = _subdivided(surface, ring, 2 * m, closed=True)
    out = shorten_run(surface, sigma, max_iter=max_iter)
    inner = homotopy_extract(surface, out, inner_frames)
    inner.frames[0] = (0.0, Cycle(list(chord_curves)))
    parts.append(inner)
    sw = concatenate(parts, "inscribed-polygon")
    sw.frames.insert(0, (0.0, Cycle([CycleCurve.point(P[0])])))
    sw.metadata = {"n": n, "bound": bound, "boundary_length": T, "gap": T - bound}
    return sw, bound


def ls_lower_bound(widths) -> float:
    """Sum of first widths of pairwise disjoint subdomains."""
    return float(sum(widths))
