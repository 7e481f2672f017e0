"""Tabulated optimal quantizer values for the three flagship measures.

Fifteen entries: unit disc n=1..6, unit square n=1..5, and the two-step
interval density n=1..4.  Values are exact closed forms where one exists
and six-significant-figure decimals otherwise; the tolerance for checks
follows suit (1e-12 vs 5e-6).  Entries marked ``conjecture_conditional``
are optimal only within a symmetry-restricted search family.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .geometry import ConvexPolygon, Disc, Point2, rotate
from .measures import PiecewiseConstant1D, UniformMeasure2D, two_step

EXACT_TOL = 1e-12
PRINTED_TOL = 5e-6

_PI = math.pi


@dataclass(frozen=True)
class ReferenceEntry:
    support: str                  # "disc" | "square" | "piecewise1d"
    n: int
    value: float
    exact: bool                   # closed form vs printed 6-significant-figure decimal
    configuration: tuple | None   # site list, or None when only the value is tabulated
    source: str
    conjecture_conditional: bool = False

    @property
    def tolerance(self) -> float:
        return EXACT_TOL if self.exact else PRINTED_TOL


def _disc_gon(n: int, radius: float, phase: float = 0.0):
    return tuple(Point2(radius * math.cos(phase + 2.0 * _PI * k / n),
                        radius * math.sin(phase + 2.0 * _PI * k / n))
                 for k in range(n))


def _center_plus_gon(n_outer: int, outer: Point2):
    pts = [Point2(0.0, 0.0)]
    for k in range(n_outer):
        pts.append(rotate(outer, 2.0 * _PI * k / n_outer))
    return tuple(pts)


_R2 = 4.0 / (3.0 * _PI)
_R3 = math.sqrt(3.0) / _PI

TABLE: tuple[ReferenceEntry, ...] = (
    ReferenceEntry("disc", 1, 0.5, True, (Point2(0.0, 0.0),),
                   "disc: one mean at the center; value is the variance"),
    ReferenceEntry("disc", 2, (9.0 * _PI ** 2 - 32.0) / (18.0 * _PI ** 2), True,
                   (Point2(_R2, 0.0), Point2(-_R2, 0.0)),
                   "disc: diameter pair on radius 4/(3*pi), closed form",
                   conjecture_conditional=True),
    ReferenceEntry("disc", 3, 0.196036, False,
                   _disc_gon(3, _R3, phase=_PI / 3.0),
                   "disc: equilateral triangle on radius sqrt(3)/pi",
                   conjecture_conditional=True),
    ReferenceEntry("disc", 4, (9.0 * _PI ** 2 - 64.0) / (18.0 * _PI ** 2), True,
                   (Point2(_R2, _R2), Point2(-_R2, _R2),
                    Point2(-_R2, -_R2), Point2(_R2, -_R2)),
                   "disc: square on radius sqrt(32)/(3*pi), closed form",
                   conjecture_conditional=True),
    ReferenceEntry("disc", 5, 0.111049, False,
                   _disc_gon(5, math.sqrt(0.388951), phase=2.0 * _PI / 10.0),
                   "disc: regular pentagon on radius sqrt(0.388951)",
                   conjecture_conditional=True),
    ReferenceEntry("disc", 6, 0.093595, False,
                   _center_plus_gon(5, Point2(0.554847, 0.40312)),
                   "disc: center plus regular pentagon on radius sqrt(0.470361)",
                   conjecture_conditional=True),
    ReferenceEntry("square", 1, 1.0 / 6.0, True, (Point2(0.5, 0.5),),
                   "square: one mean at the center; value is the variance"),
    ReferenceEntry("square", 2, 5.0 / 48.0, True,
                   (Point2(0.25, 0.5), Point2(0.75, 0.5)),
                   "square: side-bisector pair, closed form 5/48"),
    ReferenceEntry("square", 3, 0.0661797, False,
                   (Point2(0.5, 0.803764), Point2(0.231591, 0.317285),
                    Point2(0.768409, 0.317285)),
                   "square: one site on a side bisector plus mirrored pair",
                   conjecture_conditional=True),
    ReferenceEntry("square", 4, 1.0 / 24.0, True,
                   (Point2(0.25, 0.25), Point2(0.75, 0.75),
                    Point2(0.75, 0.25), Point2(0.25, 0.75)),
                   "square: quarter-square centers, closed form 1/24"),
    ReferenceEntry("square", 5, 0.0352697, False,
                   (Point2(0.5, 0.5), Point2(0.778937, 0.778937),
                    Point2(0.221063, 0.778937), Point2(0.221063, 0.221063),
                    Point2(0.778937, 0.221063)),
                   "square: center plus diagonal quad at 0.778937",
                   conjecture_conditional=True),
    ReferenceEntry("piecewise1d", 1, 73.0 / 1200.0, True, (13.0 / 20.0,),
                   "two-step density: one mean at the expected value"),
    ReferenceEntry("piecewise1d", 2, 317.0 / 15360.0, True,
                   (11.0 / 32.0, 25.0 / 32.0),
                   "two-step density: unique pair, closed form 317/15360"),
    ReferenceEntry("piecewise1d", 3, 0.00739237, False,
                   (0.200339, 0.601018, 0.867006),
                   "two-step density: unique triple"),
    ReferenceEntry("piecewise1d", 4, 1465.0 / 330672.0, True,
                   (59.0 / 332.0, 177.0 / 332.0, 239.0 / 332.0, 301.0 / 332.0),
                   "two-step density: unique quadruple, closed form 1465/330672"),
)


def measure_tag(m) -> Optional[str]:
    """Tag of the tabulated measure this one matches, else None."""
    if isinstance(m, UniformMeasure2D):
        s = m.support
        if isinstance(s, Disc):
            if abs(s.radius - 1.0) <= 1e-12 and s.center.norm() <= 1e-12:
                return "disc"
            return None
        if isinstance(s, ConvexPolygon) and len(s.vertices) == 4:
            want = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
            got = sorted((v.x, v.y) for v in s.vertices)
            if all(abs(a - c) <= 1e-12 and abs(b - d) <= 1e-12
                   for (a, b), (c, d) in zip(got, sorted(want))):
                return "square"
        return None
    if isinstance(m, PiecewiseConstant1D):
        ts = two_step()
        if len(m.breakpoints) == len(ts.breakpoints) and \
                all(abs(a - b) <= 1e-12 for a, b in
                    zip(m.breakpoints, ts.breakpoints)) and \
                all(abs(a - b) <= 1e-12 for a, b in zip(m.heights, ts.heights)):
            return "piecewise1d"
    return None


def lookup(support: str, n: int) -> Optional[ReferenceEntry]:
    """Tabulated entry for (support, n), or None when not tabulated."""
    if support == "two_step":
        support = "piecewise1d"
    for entry in TABLE:
        if entry.support == support and entry.n == n:
            return entry
    return None


def entries(support: Optional[str] = None) -> tuple[ReferenceEntry, ...]:
    if support is None:
        return TABLE
    if support == "two_step":
        support = "piecewise1d"
    return tuple(e for e in TABLE if e.support == support)


def oracle_delta(m, n: int, value: float) -> Optional[float]:
    """|value - tabulated value| when the measure and n are tabulated."""
    tag = measure_tag(m)
    if tag is None:
        return None
    entry = lookup(tag, n)
    if entry is None:
        return None
    return abs(value - entry.value)


def to_json(indent: int = 2) -> str:
    """Serialize the table (configurations as coordinate lists)."""
    rows = []
    for e in TABLE:
        d = asdict(e)
        if e.configuration is not None:
            if e.support == "piecewise1d":
                d["configuration"] = [float(s) for s in e.configuration]
            else:
                d["configuration"] = [[p.x, p.y] for p in e.configuration]
        d["tolerance"] = e.tolerance
        rows.append(d)
    return json.dumps(rows, indent=indent, sort_keys=True)
