"""Deterministic SVG rendering in the planar chart of a surface."""

from __future__ import annotations

import numpy as np

from .birkhoff import ShorteningOutcome
from .cycles import Sweepout
from .errors import IoFailure
from .network import GeodesicNetwork, _dense

SIZE = 480.0
PAD = 12.0


def _fmt(v):
    return f"{v:.4f}"


class _Canvas:
    def __init__(self, surface):
        self.surface = surface
        T = surface.boundary_length
        self.boundary = np.array([surface.planar(surface.boundary_point(s)[0])
                                  for s in np.linspace(0.0, T, 721)])
        lo = self.boundary.min(0)
        hi = self.boundary.max(0)
        span = float(max(hi - lo)) or 1.0
        self.lo, self.scale = lo, (SIZE - 2 * PAD) / span
        self.items = []

    def xy(self, P):
        Q = (np.atleast_2d(P) - self.lo) * self.scale + PAD
        Q[:, 1] = SIZE - Q[:, 1]  # y up
        return Q

    def polyline(self, ambient_pts, stroke, width=1.0, opacity=1.0, closed=False):
        P = np.array([self.surface.planar(x) for x in ambient_pts])
        Q = self.xy(P)
        if len(Q) == 1:
            self.items.append(f'<circle cx="{_fmt(Q[0, 0])}" cy="{_fmt(Q[0, 1])}" r="1.5" '
                              f'fill="{stroke}" fill-opacity="{opacity:.3f}"/>')
            return
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in Q)
        tag = "polygon" if closed else "polyline"
        self.items.append(f'<{tag} points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}" stroke-opacity="{opacity:.3f}"/>')

    def svg(self, title):
        Q = self.xy(self.boundary)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in Q)
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(SIZE)}" height="{int(SIZE)}" '
                f'viewBox="0 0 {int(SIZE)} {int(SIZE)}">\n<title>{title}</title>\n'
                f'<polygon points="{pts}" fill="#f4f4f4" stroke="black" stroke-width="1.5"/>\n')
        return head + "\n".join(self.items) + ("\n" if self.items else "") + "</svg>\n"


def _ramp(k, n):
    return 0.15 + 0.85 * (k / (n - 1) if n > 1 else 1.0)


def svg_text(obj, surface=None, title="geonet") -> str:
    if isinstance(obj, GeodesicNetwork):
        surface = obj.surface
        cv = _Canvas(surface)
        for p, m in obj.segments:
            _ts, X = _dense(surface, p, 1e-2)
            cv.polyline(X, "#c0392b", width=1.0 + m)
        return cv.svg(title)
    if surface is None:
        raise ValueError("a surface is needed to render this object")
    cv = _Canvas(surface)
    if isinstance(obj, Sweepout):
        n = len(obj.frames)
        for k, (_t, cyc) in enumerate(obj.frames):
            for c in cyc.curves:
                cv.polyline(c.points, "#1f4e99", 0.8, _ramp(k, n), c.closed)
    elif isinstance(obj, ShorteningOutcome):
        n = len(obj.trajectory)
        for k, sig in enumerate(obj.trajectory):
            cv.polyline(sig.dense(surface, 4), "#1e8449", 0.8, _ramp(k, n))
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    return cv.svg(title)


def render_svg(obj, path, surface=None, title="geonet"):
    """Write the SVG of any object svg_text accepts."""
    text = svg_text(obj, surface, title)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return path
