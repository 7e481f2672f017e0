"""Distortion of a site configuration: exact evaluation plus cross-checkers.

The exact path goes through closed-form cell moments.  ``quadrature_check``
re-integrates the same quantity with an adaptive 1D-in-x / closed-form-in-y
scheme (or Monte Carlo when given an RNG) and exists only to keep the exact
path honest.  The sector closed forms are the independent oracle for disc
cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate

from .errors import DegenerateSectorError, DuplicateSitesError, EmptyRegionError
from .geometry import (COINCIDENCE_TOL, ConvexPolygon, Disc, DiscCell,
                       HalfPlane, Point2, as_point, moments, region_is_empty,
                       voronoi_cells)
from .measures import PiecewiseConstant1D, UniformMeasure2D, segment_moments

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Configuration:
    """Ordered 2D quantizer sites, pairwise distinct."""

    sites: tuple

    def __post_init__(self):
        pts = tuple(as_point(s) for s in self.sites)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i].dist(pts[j]) <= COINCIDENCE_TOL:
                    raise DuplicateSitesError(f"sites {i} and {j} coincide")
        object.__setattr__(self, "sites", pts)

    @property
    def n(self) -> int:
        return len(self.sites)

    def sorted(self) -> "Configuration":
        return Configuration(tuple(sorted(self.sites)))


@dataclass(frozen=True)
class CellReport:
    """Per-cell mass, centroid and distortion; mass 0 flags an empty cell."""

    site_index: int
    mass: float
    centroid: object  # Point2, float, or None when empty
    distortion: float


def _coerce_sites_2d(config) -> tuple:
    if isinstance(config, Configuration):
        return config.sites
    return Configuration(tuple(config)).sites


def _coerce_sites_1d(config) -> tuple:
    if hasattr(config, "sites"):
        sites = tuple(float(s) for s in config.sites)
    else:
        sites = tuple(float(s) for s in config)
    for a, b in zip(sites, sites[1:]):
        if b - a <= COINCIDENCE_TOL:
            raise DuplicateSitesError("1D sites must be strictly increasing")
    return sites


def evaluate(config, m) -> tuple[float, list[CellReport]]:
    """Distortion of ``config`` under measure ``m`` with per-cell reports.

    The total is the sum over Voronoi cells of the second moment about the
    cell's site, weighted by the density.  Empty cells contribute zero and
    are reported with mass 0 rather than raising.
    """
    if isinstance(m, PiecewiseConstant1D):
        return _evaluate_1d(_coerce_sites_1d(config), m)
    if isinstance(m, UniformMeasure2D):
        return _evaluate_2d(_coerce_sites_2d(config), m)
    raise TypeError(f"cannot evaluate against {type(m).__name__}")


def _evaluate_2d(sites: tuple, m: UniformMeasure2D):
    cells = voronoi_cells(sites, m.support)
    reports = []
    total = 0.0
    for i, (site, cell) in enumerate(zip(sites, cells)):
        try:
            mt = moments(cell, site)
        except EmptyRegionError:
            reports.append(CellReport(i, 0.0, None, 0.0))
            continue
        mass = m.density * mt.measure0
        dist = m.density * mt.measure2
        reports.append(CellReport(i, mass, mt.centroid(), dist))
        total += dist
    return total, reports


def _evaluate_1d(sites: tuple, m: PiecewiseConstant1D):
    bounds = [m.lo]
    bounds += [0.5 * (a + b) for a, b in zip(sites, sites[1:])]
    bounds.append(m.hi)
    reports = []
    total = 0.0
    for i, site in enumerate(sites):
        seg = segment_moments(m, bounds[i], bounds[i + 1], site)
        if seg.mass <= 0.0:
            reports.append(CellReport(i, 0.0, None, 0.0))
            continue
        centroid = site + seg.moment1 / seg.mass
        reports.append(CellReport(i, seg.mass, centroid, seg.moment2))
        total += seg.moment2
    return total, reports


def _canonical_span(theta1: float, theta2: float) -> float:
    span = (theta2 - theta1) % _TWO_PI
    if span == 0.0:
        if theta2 == theta1:
            raise DegenerateSectorError("sector with zero central angle")
        span = _TWO_PI
    return span


def sector_centroid(theta1: float, theta2: float) -> Point2:
    """Centroid of the unit-disc sector between the two angles.

    Closed form ``(2(sin t1 - sin t2) / (3 (t1 - t2)), -2(cos t1 - cos t2) / (3 (t1 - t2)))``
    with the span canonicalized into (0, 2*pi].
    """
    span = _canonical_span(theta1, theta2)
    t1, t2 = theta1, theta1 + span
    return Point2(2.0 * (math.sin(t1) - math.sin(t2)) / (3.0 * (t1 - t2)),
                  -2.0 * (math.cos(t1) - math.cos(t2)) / (3.0 * (t1 - t2)))


def sector_distortion(theta1: float, theta2: float) -> float:
    """Distortion of the unit-disc sector about its own centroid.

    Mass-weighted with the disc's uniform density 1/pi:
    ``(9 d^2 - 32 sin^2(d/2)) / (36 pi d)`` for span ``d``.
    """
    d = _canonical_span(theta1, theta2)
    return (9.0 * d * d - 32.0 * math.sin(0.5 * d) ** 2) / (36.0 * math.pi * d)


# --------------------------------------------------------------------------
# Quadrature cross-checker.  Vertical slabs: for each x the y-range of a
# convex cell is exact and the inner integral of the quadratic integrand is
# closed form, so only the outer 1D integral is adaptive.

def _x_breaks(region) -> list[float]:
    if isinstance(region, ConvexPolygon):
        return sorted({v.x for v in region.vertices})
    if isinstance(region, Disc):
        region = DiscCell(region.center, region.radius, ())
    xs = {region.disc_center.x - region.disc_radius,
          region.disc_center.x + region.disc_radius}
    brep = region.boundary()
    if brep not in ("full", None):
        for p, _ in brep:
            xs.add(p.x)
    return sorted(xs)


def _y_range(region, x: float) -> Optional[tuple[float, float]]:
    if isinstance(region, ConvexPolygon):
        ys = []
        verts = region.vertices
        k = len(verts)
        for i in range(k):
            a, b = verts[i], verts[(i + 1) % k]
            if a.x == b.x:
                if abs(a.x - x) < 1e-15:
                    ys.extend((a.y, b.y))
                continue
            if (a.x - x) * (b.x - x) <= 0.0:
                t = (x - a.x) / (b.x - a.x)
                ys.append(a.y + t * (b.y - a.y))
        if len(ys) < 2:
            return None
        return min(ys), max(ys)
    if isinstance(region, Disc):
        region = DiscCell(region.center, region.radius, ())
    c, r = region.disc_center, region.disc_radius
    dx = x - c.x
    if abs(dx) >= r:
        return None
    half = math.sqrt(r * r - dx * dx)
    ylo, yhi = c.y - half, c.y + half
    for h in region.cuts:
        nx, ny, off = h.normal.x, h.normal.y, h.offset
        if abs(ny) < 1e-14:
            if nx * x > off:
                return None
            continue
        bound = (off - nx * x) / ny
        if ny > 0:
            yhi = min(yhi, bound)
        else:
            ylo = max(ylo, bound)
    if yhi <= ylo:
        return None
    return ylo, yhi


def _slab_quad(region, f_of_slab, epsabs: float) -> float:
    """Integrate a per-slab closed form over x with scipy's adaptive quad."""
    breaks = _x_breaks(region)
    lo, hi = breaks[0], breaks[-1]
    interior = [b for b in breaks if lo < b < hi]

    def integrand(x):
        rng = _y_range(region, x)
        if rng is None:
            return 0.0
        return f_of_slab(x, rng[0], rng[1])

    val, _ = integrate.quad(integrand, lo, hi, points=interior or None,
                            limit=200, epsabs=epsabs, epsrel=1e-12)
    return val


def _slab_second_moment(region, ref: Point2, epsabs: float) -> float:
    rx, ry = ref.x, ref.y

    def slab(x, ylo, yhi):
        a = ylo - ry
        b = yhi - ry
        return (x - rx) ** 2 * (yhi - ylo) + (b ** 3 - a ** 3) / 3.0

    return _slab_quad(region, slab, epsabs)


def quadrature_check(config, m, tol: float = 1e-8,
                     rng: Optional[np.random.Generator] = None,
                     mc_samples: int = 200_000) -> float:
    """Independent estimate of the distortion, for cross-checking only.

    Without an RNG the estimate is deterministic adaptive quadrature
    accurate to roughly ``tol``; with an RNG it is a Monte Carlo average of
    ``min_i |x - a_i|^2`` over ``mc_samples`` draws from the measure.
    """
    if isinstance(m, PiecewiseConstant1D):
        sites = _coerce_sites_1d(config)
        if rng is not None:
            xs = np.asarray(m.sample(rng, mc_samples))
            d = np.min((xs[:, None] - np.asarray(sites)[None, :]) ** 2, axis=1)
            return float(np.mean(d))
        pts = sorted(set(
            [0.5 * (a + b) for a, b in zip(sites, sites[1:])]
            + list(m.breakpoints[1:-1])))

        def integrand(x):
            return m.density_at(x) * min((x - s) ** 2 for s in sites)

        val, _ = integrate.quad(integrand, m.lo, m.hi, points=pts or None,
                                limit=200, epsabs=tol * 1e-2, epsrel=1e-12)
        return val

    sites = _coerce_sites_2d(config)
    if rng is not None:
        pts = m.sample(rng, mc_samples)
        arr = np.array([(p.x, p.y) for p in pts])
        sa = np.array([(s.x, s.y) for s in sites])
        d2 = ((arr[:, None, :] - sa[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        return float(np.mean(d2))
    cells = voronoi_cells(sites, m.support)
    total = 0.0
    per_cell = tol / max(len(sites), 1) * 1e-2
    for site, cell in zip(sites, cells):
        if region_is_empty(cell):
            continue
        total += m.density * _slab_second_moment(cell, site, per_cell)
    return total
