"""Boundary-adapted Birkhoff curve shortening on broken geodesics.

A broken geodesic with ``2L`` segments is stored by its ``2L + 1`` vertices
(ambient coordinates); consecutive vertices are joined by shortest geodesics.
One shortening step:

1. replace the end pieces by shortest drops from the second and penultimate
   even vertices to the boundary, and join the even vertices by shortest
   geodesics (L segments);
2. join the midpoints of those L segments by shortest geodesics;
3. resample to 2L segments of equal length.

The closed-curve variant skips the boundary drops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cycles import CycleCurve, Cycle, Sweepout
from .errors import NotCollapsed, SegmentTooLong
from .geodesics import connect_ambient, drop_ambient
from .surfaces import SurfaceSpec

FIXED_DECREASE = 1e-12
FIXED_RESIDUAL = 1e-6


@dataclass
class BrokenGeodesic:
    vertices: np.ndarray
    velocities: np.ndarray   # unit initial velocity of each segment
    seg_lengths: np.ndarray
    closed: bool = False
    endpoints_on_boundary: bool = True
    lipschitz_bound: float = math.inf

    @property
    def total_length(self) -> float:
        return float(self.seg_lengths.sum())

    @property
    def n_segments(self) -> int:
        return len(self.seg_lengths)

    @property
    def diameter(self) -> float:
        V = self.vertices
        return float(np.sqrt(((V[:, None, :] - V[None, :, :]) ** 2).sum(-1)).max())

    def chart_vertices(self, surface):
        return np.array([surface.chart(p) for p in self.vertices])

    def dense(self, surface, per_segment=4) -> np.ndarray:
        """Points along the curve, ``per_segment`` intervals per geodesic piece."""
        out = [self.vertices[0]]
        for x, v, ell in zip(self.vertices[:-1], self.velocities, self.seg_lengths):
            ts = np.linspace(0, ell, per_segment + 1)[1:]
            P, _ = surface.flow_samples(x, v, ts)
            out.extend(P)
        return np.array(out)

    def to_curve(self, surface, per_segment=4) -> CycleCurve:
        return CycleCurve(self.dense(surface, per_segment), self.total_length, self.closed)


@dataclass
class ShorteningOutcome:
    kind: str   # FixedFreeBoundaryGeodesic | FixedClosedGeodesic | Collapsed | MaxIterations
    trajectory: list
    lengths: list
    decreases: list = field(default_factory=list)
    guard_hits: int = 0
    collapse_point: np.ndarray | None = None
    worst_raw_increase: float = 0.0  # largest length gain of an unguarded step


# ---------------------------------------------------------------------------


def _segments(surface, nodes):
    vel, lens = [], []
    for a, b in zip(nodes[:-1], nodes[1:]):
        v, ell = connect_ambient(surface, a, b)
        vel.append(v)
        lens.append(ell)
    return np.array(vel), np.array(lens)


def _resample(surface, nodes, vel, lens, n_out):
    """n_out + 1 points at equal arc-length spacing along a broken geodesic."""
    if len(lens) == 0 or float(lens.sum()) == 0.0:
        return np.repeat(nodes[:1], n_out + 1, axis=0)
    total = float(lens.sum())
    targets = np.linspace(0.0, total, n_out + 1)
    starts = np.concatenate([[0.0], np.cumsum(lens)])
    idx = np.clip(np.searchsorted(starts, targets, side="right") - 1, 0, len(lens) - 1)
    out = np.empty((n_out + 1, nodes.shape[1]))
    for j in np.unique(idx):
        sel = np.nonzero(idx == j)[0]
        offs = np.clip(targets[sel] - starts[j], 0.0, lens[j])
        P, _ = surface.flow_samples(nodes[j], vel[j], offs)
        out[sel] = P
    out[0] = nodes[0]
    out[-1] = nodes[-1]
    return out


def _build(surface, vertices, closed, on_boundary, eps):
    vel, lens = _segments(surface, vertices)
    return BrokenGeodesic(vertices, vel, lens, closed, on_boundary, lipschitz_bound=len(lens) * eps)


def choose_segment_count(surface: SurfaceSpec, length: float) -> int:
    """Even segment count 2L, L = ceil(length / eps), so each of the 2L pieces is at most eps / 2."""
    return max(2, 2 * int(math.ceil(length / surface.epsilon())))


def project_to_lambda(surface: SurfaceSpec, polyline, L: int, closed: bool = False,
                      endpoints_on_boundary: bool = True, chart: bool = True) -> BrokenGeodesic:
    """Broken geodesic with 2L equal segments approximating the polyline."""
    pts = np.array([surface.embed(p) for p in polyline]) if chart else np.asarray(polyline, float)
    if closed and np.linalg.norm(pts[0] - pts[-1]) > 1e-12:
        pts = np.vstack([pts, pts[:1]])
    if endpoints_on_boundary and not closed:
        for k in (0, -1):
            s, d = surface.project_to_boundary(pts[k])
            if d > 1e-6:
                raise ValueError("open polyline must start and end on the boundary")
            pts[k] = surface.boundary_point(s)[0]
    vel, lens = _segments(surface, pts)
    verts = _resample(surface, pts, vel, lens, 2 * L)
    eps = surface.epsilon()
    sigma = _build(surface, verts, closed, endpoints_on_boundary and not closed, eps)
    if sigma.seg_lengths.max() > eps + 1e-12:
        raise SegmentTooLong(f"segment {sigma.seg_lengths.max():.4g} exceeds eps {eps:.4g}; increase L")
    return sigma


def geodesic_residual(surface: SurfaceSpec, sigma: BrokenGeodesic) -> float:
    """Largest break angle at interior vertices plus boundary orthogonality defect."""
    V, vel, lens = sigma.vertices, sigma.velocities, sigma.seg_lengths
    arrive = []
    for x, v, ell in zip(V[:-1], vel, lens):
        arrive.append(surface.exp(x, v, ell)[1])
    res = 0.0
    n = len(lens)
    pairs = [(arrive[i], vel[i + 1]) for i in range(n - 1)]
    if sigma.closed:
        pairs.append((arrive[-1], vel[0]))
    for a, b in pairs:
        c = float(np.clip(a @ b, -1.0, 1.0))
        res = max(res, math.acos(c))
    if not sigma.closed and sigma.endpoints_on_boundary:
        for x, v in ((V[0], vel[0]), (V[-1], arrive[-1])):
            s, _ = surface.project_to_boundary(x)
            res = max(res, abs(float(v @ surface.boundary_point(s)[1])))
    return res


def _drop_segment(surface, x):
    """Velocity leaving the foot and length of the shortest drop from x, reversed."""
    s, v, d = drop_ambient(surface, x)
    foot = surface.boundary_point(s)[0]
    if d == 0.0:
        return foot, v, 0.0
    _y, w = surface.exp(x, v, d)
    return foot, -w, d


def _compact(nodes, vel, lens):
    keep = lens > 1e-15
    if keep.all():
        return nodes, vel, lens
    idx = np.nonzero(keep)[0]
    return np.vstack([nodes[idx], nodes[-1:]]), vel[idx], lens[idx]


def _midpoint_pass(surface, nodes, vel, lens, anchored):
    mids, mid_vel = [], []
    for x, v, ell in zip(nodes[:-1], vel, lens):
        m, vm = surface.exp(x, v, 0.5 * ell)
        mids.append(m)
        mid_vel.append(vm)
    if not anchored:
        nodes2 = np.array(mids + [mids[0]])
        return (nodes2,) + _segments(surface, nodes2)
    nodes2 = np.array([nodes[0]] + mids + [nodes[-1]])
    inner_v, inner_l = _segments(surface, nodes2[1:-1])
    vel2 = np.vstack([vel[:1], inner_v, mid_vel[-1][None, :]]) if len(inner_l) else \
        np.vstack([vel[:1], mid_vel[-1][None, :]])
    lens2 = np.concatenate([[0.5 * lens[0]], inner_l, [0.5 * lens[-1]]])
    return nodes2, vel2, lens2


def _step_open(surface, sigma):
    V = sigma.vertices
    n = len(V) - 1
    L = n // 2
    foot0, w0, d0 = _drop_segment(surface, V[2])
    s1, v1, d1 = drop_ambient(surface, V[n - 2])
    foot1 = surface.boundary_point(s1)[0]
    # first approximation: foot0, x2, x4, ..., x_{2L-2}, foot1
    nodes = np.array([foot0] + [V[2 * i] for i in range(1, L)] + [foot1])
    inner_v, inner_l = _segments(surface, nodes[1:-1])
    vel = np.vstack([w0[None, :]] + ([inner_v] if len(inner_l) else []) + [v1[None, :]])
    lens = np.concatenate([[d0], inner_l, [d1]])
    nodes, vel, lens = _compact(nodes, vel, lens)
    if len(lens) == 0:
        return _resample(surface, nodes, vel, lens, n)
    # second approximation through the midpoints
    nodes2, vel2, lens2 = _midpoint_pass(surface, nodes, vel, lens, True)
    nodes2, vel2, lens2 = _compact(nodes2, vel2, lens2)
    return _resample(surface, nodes2, vel2, lens2, n)


def _step_closed(surface, sigma):
    V = sigma.vertices
    n = len(V) - 1
    L = n // 2
    nodes = np.array([V[2 * i] for i in range(L + 1)])
    vel, lens = _segments(surface, nodes)
    nodes2, vel2, lens2 = _midpoint_pass(surface, nodes, vel, lens, False)
    nodes2, vel2, lens2 = _compact(nodes2, vel2, lens2)
    return _resample(surface, nodes2, vel2, lens2, n)


def _raw_step(surface, sigma):
    if sigma.n_segments < 4:
        raise ValueError("shortening needs at least four segments (L >= 2)")
    verts = _step_closed(surface, sigma) if sigma.closed else _step_open(surface, sigma)
    vel, lens = _segments(surface, verts)
    new = BrokenGeodesic(verts, vel, lens, sigma.closed, sigma.endpoints_on_boundary,
                         sigma.lipschitz_bound)
    return new, sigma.total_length - new.total_length


def shorten_step(surface: SurfaceSpec, sigma: BrokenGeodesic):
    """One application of the shortening map; returns (new curve, decrease)."""
    new, delta = _raw_step(surface, sigma)
    return _guard(sigma, new, delta)


def _guard(sigma, new, delta):
    if delta < 0:
        # roundoff at a fixed point: the map never lengthens, keep the input
        return sigma, 0.0
    eps = sigma.lipschitz_bound / sigma.n_segments
    if math.isfinite(eps) and new.seg_lengths.max() > eps + 1e-9:
        raise SegmentTooLong("shortened curve violates the segment bound")
    return new, float(delta)


def shorten_run(surface: SurfaceSpec, sigma0: BrokenGeodesic, tol: float | None = None,
                max_iter: int = 2000, keep_every: int = 1) -> ShorteningOutcome:
    """Iterate the shortening map until the curve collapses or stops moving, at most max_iter times."""
    if tol is None:
        tol = 1e-4 * surface.diameter
    sigma = sigma0
    traj = [sigma]
    lengths = [sigma.total_length]
    decs = []
    guard = 0
    worst = 0.0
    kind = "MaxIterations"
    for it in range(max_iter):
        if sigma.diameter < tol:
            kind = "Collapsed"
            break
        raw, delta = _raw_step(surface, sigma)
        worst = max(worst, -delta)
        new, delta = _guard(sigma, raw, delta)
        if new is sigma:
            guard += 1
        decs.append(delta)
        sigma = new
        lengths.append(sigma.total_length)
        if keep_every and (it + 1) % keep_every == 0:
            traj.append(sigma)
        if delta < FIXED_DECREASE and geodesic_residual(surface, sigma) < FIXED_RESIDUAL:
            kind = "FixedClosedGeodesic" if sigma.closed else "FixedFreeBoundaryGeodesic"
            break
    else:
        if sigma.diameter < tol:
            kind = "Collapsed"
    if traj[-1] is not sigma:
        traj.append(sigma)
    point = sigma.vertices.mean(axis=0) if kind == "Collapsed" else None
    if point is not None and sigma.endpoints_on_boundary and not sigma.closed:
        point = sigma.vertices[0].copy()
    return ShorteningOutcome(kind, traj, lengths, decs, guard, point, worst)


def homotopy_extract(surface: SurfaceSpec, outcome: ShorteningOutcome, n_frames: int = 512,
                     per_segment: int = 2) -> Sweepout:
    """Length-bounded family from the initial curve to a point."""
    if outcome.kind != "Collapsed":
        raise NotCollapsed(f"outcome is {outcome.kind}")
    traj = outcome.trajectory
    idx = np.unique(np.round(np.linspace(0, len(traj) - 1, max(n_frames - 1, 1))).astype(int))
    frames = []
    n = len(idx) + 1
    for k, i in enumerate(idx):
        frames.append((k / (n - 1), Cycle([traj[i].to_curve(surface, per_segment)])))
    frames.append((1.0, Cycle([CycleCurve.point(outcome.collapse_point)])))
    return Sweepout(frames, "birkhoff-homotopy", {"n_snapshots": len(traj)})


def self_intersections(surface, sigma: BrokenGeodesic, per_segment=2) -> int:
    """Number of transversal self-crossings of the curve (planar chart)."""
    P = np.array([surface.planar(x) for x in sigma.dense(surface, per_segment)])
    A, B = P[:-1], P[1:]
    count = 0
    m = len(A)
    for i in range(m):
        j0 = i + 2
        if j0 >= m:
            continue
        C, D = A[j0:], B[j0:]
        if sigma.closed and i == 0:
            C, D = C[:-1], D[:-1]
        d1 = _orient(A[i], B[i], C)
        d2 = _orient(A[i], B[i], D)
        d3 = _orient(C, D, A[i])
        d4 = _orient(C, D, B[i])
        count += int(np.sum((d1 * d2 < 0) & (d3 * d4 < 0)))
    return count


def _orient(a, b, c):
    c = np.atleast_2d(c) if np.ndim(c) == 1 and np.ndim(a) > 1 else c
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def frame_violations(surface, outcome: ShorteningOutcome) -> list:
    """Frames whose self-crossing count exceeds that of the initial curve."""
    base = self_intersections(surface, outcome.trajectory[0])
    return [i for i, s in enumerate(outcome.trajectory) if self_intersections(surface, s) > base]
