"""Planar geometry of quantizer cells: clipping and closed-form moments.

Two region kinds are supported: convex polygons, and "disc cells" (a disc
intersected with half-planes, so the boundary is a mix of chords and
circular arcs).  Both expose exact area, first moment and second moment
about an arbitrary reference point; everything downstream (distortion,
Lloyd steps) is built on those three numbers.

Conventions: vertices are counterclockwise, half-planes are the feasible
side ``normal . p <= offset`` with a unit normal, and all tolerances are
fixed module constants so test baselines stay stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

from .errors import DuplicateSitesError, EmptyRegionError

COINCIDENCE_TOL = 1e-12  # point/normal coincidence
EMPTY_AREA_TOL = 1e-14   # regions below this area count as empty

_TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    """Point (or vector) in the plane."""

    x: float
    y: float

    def __add__(self, other: "Point2") -> "Point2":  # type: ignore[override]
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Point2":
        return Point2(-self.x, -self.y)

    def scaled(self, s: float) -> "Point2":
        return Point2(self.x * s, self.y * s)

    def dot(self, other: "Point2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


ORIGIN = Point2(0.0, 0.0)


def rotate(p: Point2, angle: float, about: Point2 = ORIGIN) -> Point2:
    """Rotate ``p`` by ``angle`` radians counterclockwise about ``about``."""
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p.x - about.x, p.y - about.y
    return Point2(about.x + c * dx - s * dy, about.y + s * dx + c * dy)


def as_point(p) -> Point2:
    if isinstance(p, Point2):
        return p
    x, y = p
    return Point2(float(x), float(y))


@dataclass(frozen=True)
class HalfPlane:
    """Feasible side ``normal . p <= offset`` with a unit normal."""

    normal: Point2
    offset: float

    def __post_init__(self):
        n = self.normal.norm()
        if abs(n - 1.0) > COINCIDENCE_TOL:
            raise ValueError(f"half-plane normal must be unit length, got {n!r}")

    @staticmethod
    def through(normal, offset: float) -> "HalfPlane":
        """Build a half-plane from an arbitrary (non-unit) normal."""
        n = as_point(normal)
        ln = n.norm()
        if ln <= COINCIDENCE_TOL:
            raise ValueError("half-plane normal must be nonzero")
        return HalfPlane(Point2(n.x / ln, n.y / ln), float(offset) / ln)

    @staticmethod
    def bisector(keep: Point2, other: Point2) -> "HalfPlane":
        """Half-plane of points at least as close to ``keep`` as to ``other``."""
        d = other - keep
        ln = d.norm()
        if ln <= COINCIDENCE_TOL:
            raise DuplicateSitesError(f"sites coincide: {keep} ~ {other}")
        n = Point2(d.x / ln, d.y / ln)
        mid = Point2(0.5 * (keep.x + other.x), 0.5 * (keep.y + other.y))
        return HalfPlane(n, n.dot(mid))

    def contains(self, p: Point2, tol: float = COINCIDENCE_TOL) -> bool:
        return self.normal.dot(p) <= self.offset + tol


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with counterclockwise vertices.

    Orientation is normalized on construction; consecutive duplicate
    vertices are merged.  Collinear vertices are tolerated (clipping
    produces them) but reflex corners are rejected.
    """

    vertices: tuple

    def __post_init__(self):
        verts = [as_point(v) for v in self.vertices]
        for v in verts:
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                raise ValueError("polygon vertex not finite")
        verts = _dedup_ring(verts)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 distinct vertices")
        if _ring_area(verts) < 0.0:
            verts.reverse()
        if _ring_area(verts) <= EMPTY_AREA_TOL:
            raise ValueError("polygon area is not positive")
        k = len(verts)
        for i in range(k):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % k]
            e1, e2 = b - a, c - b
            if e1.cross(e2) < -COINCIDENCE_TOL * max(e1.norm() * e2.norm(), 1.0):
                raise ValueError("polygon is not convex")
        object.__setattr__(self, "vertices", tuple(verts))

    def area(self) -> float:
        return _ring_area(list(self.vertices))

    def contains(self, p: Point2, tol: float = COINCIDENCE_TOL) -> bool:
        verts = self.vertices
        k = len(verts)
        for i in range(k):
            a, b = verts[i], verts[(i + 1) % k]
            if (b - a).cross(p - a) < -tol:
                return False
        return True


@dataclass(frozen=True)
class Disc:
    """Full disc used as a support region."""

    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError("disc radius must be positive and finite")

    def area(self) -> float:
        return math.pi * self.radius * self.radius

    def contains(self, p: Point2, tol: float = COINCIDENCE_TOL) -> bool:
        return p.dist(self.center) <= self.radius + tol


@dataclass(frozen=True)
class DiscCell:
    """Disc intersected with half-planes: ``disc ∩ (∩ cuts)``.

    The boundary representation is computed eagerly: either the marker
    ``"full"``, ``None`` for an empty intersection, or a CCW list of
    ``(vertex, arc_to_next)`` pairs where ``arc_to_next`` says the edge to
    the following vertex runs along the circle.
    """

    disc_center: Point2
    disc_radius: float
    cuts: tuple = ()
    _brep: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "disc_center", as_point(self.disc_center))
        if not (self.disc_radius > 0.0 and math.isfinite(self.disc_radius)):
            raise ValueError("disc radius must be positive and finite")
        object.__setattr__(self, "cuts", tuple(self.cuts))
        brep = "full"
        cx, cy, r = self.disc_center.x, self.disc_center.y, self.disc_radius
        for h in self.cuts:
            brep = _clip_brep(brep, cx, cy, r, h.normal.x, h.normal.y, h.offset)
            if brep is None:
                break
        object.__setattr__(self, "_brep", brep)

    def is_empty(self) -> bool:
        if self._brep is None:
            return True
        if self._brep == "full":
            return False
        a, _, _, _ = self._moment_tuple(0.0, 0.0)
        return a <= EMPTY_AREA_TOL

    def boundary(self):
        """Boundary rep: "full", None (empty) or CCW [(Point2, arc_to_next)]."""
        return self._brep

    def _moment_tuple(self, rx: float, ry: float):
        brep = self._brep
        if brep is None:
            return 0.0, 0.0, 0.0, 0.0
        cx, cy, r = self.disc_center.x, self.disc_center.y, self.disc_radius
        if brep == "full":
            a = math.pi * r * r
            dx, dy = cx - rx, cy - ry
            m2 = 0.5 * math.pi * r ** 4 + a * (dx * dx + dy * dy)
            return a, a * dx, a * dy, m2
        verts = [p for p, _ in brep]
        a, mx, my, m2 = _poly_moments(verts, rx, ry)
        dx, dy = cx - rx, cy - ry
        d2 = dx * dx + dy * dy
        k = len(brep)
        for i in range(k):
            p0, is_arc = brep[i]
            if not is_arc:
                continue
            p1 = brep[(i + 1) % k][0]
            t0 = math.atan2(p0.y - cy, p0.x - cx)
            t1 = math.atan2(p1.y - cy, p1.x - cx)
            span = (t1 - t0) % _TWO_PI
            if span <= 0.0:
                span = _TWO_PI
            sin_span = math.sin(span)
            a_tri = 0.5 * r * r * sin_span
            a_seg = 0.5 * r * r * (span - sin_span)
            # sector minus center triangle, everything about the disc center
            m1x_sec = (r ** 3 / 3.0) * (math.sin(t1) - math.sin(t0))
            m1y_sec = (r ** 3 / 3.0) * (math.cos(t0) - math.cos(t1))
            ux, uy = p0.x - cx, p0.y - cy
            vx, vy = p1.x - cx, p1.y - cy
            m1x_seg = m1x_sec - a_tri * (ux + vx) / 3.0
            m1y_seg = m1y_sec - a_tri * (uy + vy) / 3.0
            m2_seg = 0.25 * r ** 4 * span - a_tri / 6.0 * (2.0 * r * r + ux * vx + uy * vy)
            a += a_seg
            mx += m1x_seg + a_seg * dx
            my += m1y_seg + a_seg * dy
            m2 += m2_seg + 2.0 * (dx * m1x_seg + dy * m1y_seg) + a_seg * d2
        return a, mx, my, m2


Region = Union[ConvexPolygon, DiscCell, Disc]


@dataclass(frozen=True)
class MomentTriple:
    """Area, first moment and second moment of a region about a reference.

    ``measure1 = ∫ (x - ref) dA`` and ``measure2 = ∫ |x - ref|^2 dA``.
    """

    measure0: float
    measure1: Point2
    measure2: float
    reference: Point2

    def centroid(self) -> Point2:
        if self.measure0 <= EMPTY_AREA_TOL:
            raise EmptyRegionError("centroid of an empty region")
        return Point2(
            self.reference.x + self.measure1.x / self.measure0,
            self.reference.y + self.measure1.y / self.measure0,
        )

    def shifted(self, new_ref: Point2) -> "MomentTriple":
        """Re-reference using the exact shift identity."""
        d = self.reference - new_ref  # old ref relative to new
        m1 = Point2(self.measure1.x + self.measure0 * d.x,
                    self.measure1.y + self.measure0 * d.y)
        m2 = (self.measure2
              + 2.0 * (d.x * self.measure1.x + d.y * self.measure1.y)
              + self.measure0 * (d.x * d.x + d.y * d.y))
        return MomentTriple(self.measure0, m1, m2, new_ref)


def _dedup_ring(verts):
    out = []
    for v in verts:
        if out and v.dist(out[-1]) <= COINCIDENCE_TOL:
            continue
        out.append(v)
    while len(out) > 1 and out[0].dist(out[-1]) <= COINCIDENCE_TOL:
        out.pop()
    return out


def _ring_area(verts) -> float:
    a = 0.0
    k = len(verts)
    for i in range(k):
        p, q = verts[i], verts[(i + 1) % k]
        a += p.x * q.y - q.x * p.y
    return 0.5 * a


def _poly_moments(verts, rx: float, ry: float):
    """Fan-triangulated closed-form moments of a CCW vertex ring about (rx, ry)."""
    if len(verts) < 3:
        return 0.0, 0.0, 0.0, 0.0
    x0 = verts[0].x - rx
    y0 = verts[0].y - ry
    area = mx = my = m2 = 0.0
    for i in range(1, len(verts) - 1):
        x1 = verts[i].x - rx
        y1 = verts[i].y - ry
        x2 = verts[i + 1].x - rx
        y2 = verts[i + 1].y - ry
        a = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
        area += a
        mx += a * (x0 + x1 + x2) / 3.0
        my += a * (y0 + y1 + y2) / 3.0
        m2 += a / 6.0 * (
            x0 * x0 + y0 * y0 + x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
            + x0 * x1 + y0 * y1 + x1 * x2 + y1 * y2 + x2 * x0 + y2 * y0
        )
    return area, mx, my, m2


def _clip_ring(verts, nx: float, ny: float, off: float):
    """Single Sutherland–Hodgman pass of a CCW ring against n.p <= off."""
    out = []
    k = len(verts)
    for i in range(k):
        p0 = verts[i]
        p1 = verts[(i + 1) % k]
        d0 = nx * p0.x + ny * p0.y - off
        d1 = nx * p1.x + ny * p1.y - off
        in0 = d0 <= COINCIDENCE_TOL
        in1 = d1 <= COINCIDENCE_TOL
        if in0:
            out.append(p0)
        if in0 != in1:
            t = d0 / (d0 - d1)
            out.append(Point2(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)))
    return _dedup_ring(out)


def _clip_brep(brep, cx: float, cy: float, r: float, nx: float, ny: float, off: float):
    """Clip a disc-cell boundary rep by one half-plane."""
    s = off - (nx * cx + ny * cy)  # signed distance of the line past the center
    if brep == "full":
        if s >= r - COINCIDENCE_TOL:
            return "full"  # tangent ties resolve to "kept"
        if s <= -r + COINCIDENCE_TOL:
            return None
        h = math.sqrt(max(r * r - s * s, 0.0))
        entry = Point2(cx + s * nx - h * ny, cy + s * ny + h * nx)
        exit_ = Point2(cx + s * nx + h * ny, cy + s * ny - h * nx)
        return [(entry, True), (exit_, False)]
    if brep is None:
        return None

    crossings = []
    if -r + COINCIDENCE_TOL < s < r - COINCIDENCE_TOL:
        h = math.sqrt(max(r * r - s * s, 0.0))
        for pt in (Point2(cx + s * nx - h * ny, cy + s * ny + h * nx),
                   Point2(cx + s * nx + h * ny, cy + s * ny - h * nx)):
            crossings.append((math.atan2(pt.y - cy, pt.x - cx), pt))

    out = []
    k = len(brep)
    for i in range(k):
        p0, is_arc = brep[i]
        p1 = brep[(i + 1) % k][0]
        d0 = nx * p0.x + ny * p0.y - off
        d1 = nx * p1.x + ny * p1.y - off
        in0 = d0 <= COINCIDENCE_TOL
        in1 = d1 <= COINCIDENCE_TOL
        if not is_arc:
            if in0:
                out.append((p0, False))
            if in0 != in1:
                t = d0 / (d0 - d1)
                out.append((Point2(p0.x + t * (p1.x - p0.x),
                                   p0.y + t * (p1.y - p0.y)), False))
        else:
            t0 = math.atan2(p0.y - cy, p0.x - cx)
            t1 = math.atan2(p1.y - cy, p1.x - cx)
            span = (t1 - t0) % _TWO_PI
            if span <= 0.0:
                span = _TWO_PI
            on_arc = []
            for ang, pt in crossings:
                rel = (ang - t0) % _TWO_PI
                if COINCIDENCE_TOL < rel < span - COINCIDENCE_TOL:
                    on_arc.append((rel, pt))
            on_arc.sort(key=lambda it: it[0])
            rel_prev, pt_prev = 0.0, p0
            for rel, pt in on_arc + [(span, p1)]:
                mid = t0 + 0.5 * (rel_prev + rel)
                mx = cx + r * math.cos(mid)
                my = cy + r * math.sin(mid)
                if nx * mx + ny * my <= off:
                    out.append((pt_prev, True))
                    if rel < span - COINCIDENCE_TOL:
                        # leaves the circle here; boundary continues on the cut line
                        out.append((pt, False))
                rel_prev, pt_prev = rel, pt

    cleaned = []
    for p, flag in out:
        if cleaned and p.dist(cleaned[-1][0]) <= COINCIDENCE_TOL:
            cleaned[-1] = (cleaned[-1][0], flag)
            continue
        cleaned.append((p, flag))
    while len(cleaned) > 1 and cleaned[0][0].dist(cleaned[-1][0]) <= COINCIDENCE_TOL:
        first = cleaned.pop(0)
        cleaned[-1] = (cleaned[-1][0], first[1])
    if len(cleaned) < 2:
        return None
    return cleaned


def region_is_empty(region: Optional[Region]) -> bool:
    """Uniform emptiness test; ``None`` stands for an empty polygon."""
    if region is None:
        return True
    if isinstance(region, DiscCell):
        return region.is_empty()
    if isinstance(region, ConvexPolygon):
        return region.area() <= EMPTY_AREA_TOL
    return False


def clip(region: Region, h: HalfPlane):
    """Intersect a region with one half-plane.

    Polygons get a Sutherland–Hodgman pass (``None`` when the result is
    empty); disc supports/cells collect the cut in their cut list.
    """
    if isinstance(region, ConvexPolygon):
        ring = _clip_ring(list(region.vertices), h.normal.x, h.normal.y, h.offset)
        if len(ring) < 3 or _ring_area(ring) <= EMPTY_AREA_TOL:
            return None
        return ConvexPolygon(tuple(ring))
    if isinstance(region, Disc):
        return DiscCell(region.center, region.radius, (h,))
    if isinstance(region, DiscCell):
        return DiscCell(region.disc_center, region.disc_radius, region.cuts + (h,))
    raise TypeError(f"cannot clip {type(region).__name__}")


def moments(region: Optional[Region], ref) -> MomentTriple:
    """Exact area / first moment / second moment about ``ref``.

    Raises :class:`EmptyRegionError` when the region is empty (area below
    the fixed emptiness tolerance).
    """
    ref = as_point(ref)
    if region is None:
        raise EmptyRegionError("moments of an empty region")
    if isinstance(region, ConvexPolygon):
        a, mx, my, m2 = _poly_moments(list(region.vertices), ref.x, ref.y)
    elif isinstance(region, Disc):
        cell = DiscCell(region.center, region.radius, ())
        a, mx, my, m2 = cell._moment_tuple(ref.x, ref.y)
    elif isinstance(region, DiscCell):
        a, mx, my, m2 = region._moment_tuple(ref.x, ref.y)
    else:
        raise TypeError(f"no moments for {type(region).__name__}")
    if a <= EMPTY_AREA_TOL:
        raise EmptyRegionError("region has zero area")
    return MomentTriple(a, Point2(mx, my), m2, ref)


def voronoi_cells(sites: Sequence, support: Region):
    """Voronoi cells of ``sites`` clipped to ``support``.

    Built by O(n^2) pairwise bisector clipping.  Cell ``i`` may come out
    empty (``None`` for polygon supports, an empty ``DiscCell`` for disc
    supports) when its site is dominated everywhere on the support.
    """
    pts = [as_point(s) for s in sites]
    if not pts:
        raise ValueError("need at least one site")
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i].dist(pts[j]) <= COINCIDENCE_TOL:
                raise DuplicateSitesError(f"sites {i} and {j} coincide")
    cells = []
    if isinstance(support, (Disc, DiscCell)):
        if isinstance(support, Disc):
            center, radius, base = support.center, support.radius, ()
        else:
            center, radius, base = support.disc_center, support.disc_radius, support.cuts
        for i, p in enumerate(pts):
            cuts = list(base)
            for j, q in enumerate(pts):
                if j != i:
                    cuts.append(HalfPlane.bisector(p, q))
            cells.append(DiscCell(center, radius, tuple(cuts)))
        return cells
    if isinstance(support, ConvexPolygon):
        for i, p in enumerate(pts):
            ring = list(support.vertices)
            for j, q in enumerate(pts):
                if j == i:
                    continue
                h = HalfPlane.bisector(p, q)
                ring = _clip_ring(ring, h.normal.x, h.normal.y, h.offset)
                if len(ring) < 3:
                    ring = []
                    break
            if len(ring) >= 3 and _ring_area(ring) > EMPTY_AREA_TOL:
                cells.append(ConvexPolygon(tuple(ring)))
            else:
                cells.append(None)
        return cells
    raise TypeError(f"unsupported support kind {type(support).__name__}")


def unit_square() -> ConvexPolygon:
    return ConvexPolygon((Point2(0.0, 0.0), Point2(1.0, 0.0),
                          Point2(1.0, 1.0), Point2(0.0, 1.0)))


def unit_disc() -> Disc:
    return Disc(ORIGIN, 1.0)


def regular_gon_sites(n: int, radius: float, center: Point2 = ORIGIN,
                      phase: float = 0.0):
    """Vertices of a regular n-gon, used as candidate quantizer sites."""
    return [Point2(center.x + radius * math.cos(phase + _TWO_PI * k / n),
                   center.y + radius * math.sin(phase + _TWO_PI * k / n))
            for k in range(n)]
