"""Probability measures: uniform on a 2D support, piecewise-constant on an interval.

Measures must already be normalized; a density that does not integrate to
one (within 1e-12) is rejected rather than rescaled, so fixtures stay
exactly what they claim to be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .geometry import (ORIGIN, ConvexPolygon, Disc, Point2, as_point,
                       moments, unit_disc, unit_square)

NORMALIZATION_TOL = 1e-12


class Moment1D(NamedTuple):
    """Mass, first and second moment of a 1D density slice about ``reference``."""

    mass: float
    moment1: float
    moment2: float
    reference: float


@dataclass(frozen=True)
class UniformMeasure2D:
    """Uniform probability measure on a convex polygon or disc."""

    support: Union[ConvexPolygon, Disc]
    density: float = field(default=0.0)

    def __post_init__(self):
        area = moments(self.support, ORIGIN).measure0
        implied = 1.0 / area
        if self.density:
            if abs(self.density * area - 1.0) > NORMALIZATION_TOL:
                raise ValueError("density does not normalize the support area to 1")
        else:
            object.__setattr__(self, "density", implied)

    def mean(self) -> Point2:
        return moments(self.support, ORIGIN).centroid()

    def variance(self) -> float:
        mu = self.mean()
        return self.density * moments(self.support, mu).measure2

    def diameter(self) -> float:
        if isinstance(self.support, Disc):
            return 2.0 * self.support.radius
        verts = self.support.vertices
        return max(a.dist(b) for i, a in enumerate(verts) for b in verts[i + 1:])

    def contains(self, p: Point2) -> bool:
        return self.support.contains(p)

    def sample(self, rng: np.random.Generator, size: int):
        """Draw ``size`` points from the measure."""
        if isinstance(self.support, Disc):
            r = self.support.radius * np.sqrt(rng.random(size))
            th = 2.0 * math.pi * rng.random(size)
            return [Point2(self.support.center.x + ri * math.cos(ti),
                           self.support.center.y + ri * math.sin(ti))
                    for ri, ti in zip(r, th)]
        verts = self.support.vertices
        tris = [(verts[0], verts[i], verts[i + 1]) for i in range(1, len(verts) - 1)]
        areas = np.array([0.5 * abs((b - a).cross(c - a)) for a, b, c in tris])
        weights = areas / areas.sum()
        idx = rng.choice(len(tris), size=size, p=weights)
        u = rng.random(size)
        v = rng.random(size)
        pts = []
        for k, ui, vi in zip(idx, u, v):
            a, b, c = tris[k]
            su = math.sqrt(ui)
            pts.append(Point2(
                (1 - su) * a.x + su * (1 - vi) * b.x + su * vi * c.x,
                (1 - su) * a.y + su * (1 - vi) * b.y + su * vi * c.y,
            ))
        return pts


@dataclass(frozen=True)
class PiecewiseConstant1D:
    """Step density on [b0, bk]: height ``heights[i]`` on [b_i, b_{i+1})."""

    breakpoints: tuple
    heights: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        hs = tuple(float(h) for h in self.heights)
        if len(bp) < 2 or len(hs) != len(bp) - 1:
            raise ValueError("need k+1 breakpoints for k heights")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(h < 0.0 for h in hs):
            raise ValueError("heights must be nonnegative")
        total = sum(h * (b1 - b0) for h, b0, b1 in zip(hs, bp, bp[1:]))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"density integrates to {total!r}, not 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "heights", hs)

    @property
    def lo(self) -> float:
        return self.breakpoints[0]

    @property
    def hi(self) -> float:
        return self.breakpoints[-1]

    def density_at(self, x: float) -> float:
        """Evaluate the density; pieces are closed on the left."""
        bp = self.breakpoints
        if x < bp[0] or x > bp[-1]:
            return 0.0
        for i, b in enumerate(bp[1:]):
            if x < b:
                return self.heights[i]
        return self.heights[-1]

    def mean(self) -> float:
        return segment_moments(self, self.lo, self.hi, 0.0).moment1

    def variance(self) -> float:
        mu = self.mean()
        return segment_moments(self, self.lo, self.hi, mu).moment2

    def mass(self, lo: float, hi: float) -> float:
        return segment_moments(self, lo, hi, 0.0).mass

    def sample(self, rng: np.random.Generator, size: int):
        bp, hs = self.breakpoints, self.heights
        masses = np.array([h * (b1 - b0) for h, b0, b1 in zip(hs, bp, bp[1:])])
        # zero-mass pieces are never drawn
        weights = masses / masses.sum()
        idx = rng.choice(len(hs), size=size, p=weights)
        u = rng.random(size)
        return [bp[k] + ui * (bp[k + 1] - bp[k]) for k, ui in zip(idx, u)]


Measure = Union[UniformMeasure2D, PiecewiseConstant1D]


@dataclass(frozen=True)
class MeasureSummary:
    mean: object  # Point2 for 2D, float for 1D
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be nonnegative")


def summarize(m: Measure) -> MeasureSummary:
    """Exact mean and variance (expected squared distance to the mean)."""
    return MeasureSummary(m.mean(), m.variance())


def segment_moments(m: PiecewiseConstant1D, lo: float, hi: float,
                    ref: float) -> Moment1D:
    """Mass and first/second moments of ``m`` restricted to [lo, hi] about ``ref``.

    An empty or reversed interval gives the zero triple.  The integral is
    split at interior density breakpoints, each piece in closed form.
    """
    if hi <= lo:
        return Moment1D(0.0, 0.0, 0.0, ref)
    lo = max(lo, m.lo)
    hi = min(hi, m.hi)
    if hi <= lo:
        return Moment1D(0.0, 0.0, 0.0, ref)
    mass = m1 = m2 = 0.0
    bp, hs = m.breakpoints, m.heights
    for i, h in enumerate(hs):
        s = max(lo, bp[i])
        e = min(hi, bp[i + 1])
        if e <= s or h == 0.0:
            continue
        a = s - ref
        b = e - ref
        mass += h * (e - s)
        m1 += h * 0.5 * (b * b - a * a)
        m2 += h * (b * b * b - a * a * a) / 3.0
    return Moment1D(mass, m1, m2, ref)


def two_step() -> PiecewiseConstant1D:
    """The flagship step density: 2/5 on [0, 1/2], 8/5 on [1/2, 1]."""
    return PiecewiseConstant1D((0.0, 0.5, 1.0), (0.4, 1.6))


def uniform_disc_measure() -> UniformMeasure2D:
    return UniformMeasure2D(unit_disc())


def uniform_square_measure() -> UniformMeasure2D:
    return UniformMeasure2D(unit_square())
