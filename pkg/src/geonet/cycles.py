"""Concrete cycles (finite curve collections) and sampled one-parameter families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CycleCurve:
    """A sampled curve with its exact length (ambient sample points)."""

    points: np.ndarray
    length: float
    closed: bool = False

    @classmethod
    def point(cls, x):
        return cls(np.asarray(x, float)[None, :].copy(), 0.0)


@dataclass
class Cycle:
    curves: list = field(default_factory=list)

    @property
    def mass(self) -> float:
        return float(sum(c.length for c in self.curves))


@dataclass
class Sweepout:
    """Ordered frames (t_k, Cycle) with t_k increasing in [0, 1]."""

    frames: list
    construction: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def masses(self) -> np.ndarray:
        return np.array([c.mass for _t, c in self.frames])

    @property
    def max_mass(self) -> float:
        m = self.masses
        return float(m.max()) if len(m) else 0.0

    def reversed(self) -> "Sweepout":
        frames = [(1.0 - t, c) for t, c in reversed(self.frames)]
        return Sweepout(frames, self.construction, dict(self.metadata))

    def to_json(self, surface) -> dict:
        return {
            "construction": self.construction,
            "metadata": self.metadata,
            "frames": [
                {"t": t, "mass": c.mass,
                 "curves": [{"length": cv.length, "closed": cv.closed,
                             "samples": [surface.chart(p).tolist() for p in cv.points]}
                            for cv in c.curves]}
                for t, c in self.frames
            ],
        }


def concatenate(parts, construction="concatenation") -> Sweepout:
    """Join sweepouts end to end, rescaling each onto a sub-interval of [0, 1]."""
    parts = [p for p in parts if p.frames]
    n = len(parts)
    frames = []
    for i, p in enumerate(parts):
        for t, c in p.frames:
            frames.append(((i + t) / n, c))
    return Sweepout(frames, construction)
