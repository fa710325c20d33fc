"""Geometric kernel: circle sizing, lens-area inversion, region polygons, poles.

Circle areas encode set sizes through a single area_scale factor
(area units per element).  Pairwise center distances are recovered from
target overlap areas by bisecting the monotone two-circle lens function.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from shapely.geometry import MultiPolygon
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient

from .errors import GeometryError
from .setops import RegionTable

# Parts smaller than this (diagram units squared) are treated as slivers.
_AREA_EPS = 1e-9

# Lens inversion: bisection width tolerance, relative to r1+r2.
_BISECT_TOL = 1e-12

# Overlap targets may exceed the feasible range by this relative slack (clamped).
_FEASIBLE_SLACK = 1e-9


@dataclass(frozen=True)
class Circle:
    """A positioned circle in diagram units."""

    x: float
    y: float
    r: float


@dataclass(frozen=True)
class CircleModel:
    """Per-set radii and the symmetric matrix of target center distances."""

    radii: tuple[float, ...]
    target: tuple[tuple[float, ...], ...]
    area_scale: float

    @property
    def n(self) -> int:
        return len(self.radii)


@dataclass(frozen=True)
class Polygon:
    """Polygon as closed rings, stored unclosed: outer rings CCW, holes CW.

    Multiple outer rings encode disjoint parts of one region.
    """

    rings: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        for ring in self.rings:
            if len(ring) < 3:
                raise GeometryError("polygon ring needs at least 3 vertices")


@dataclass(frozen=True)
class PolePlacement:
    """Interior point farthest from the polygon boundary."""

    point: tuple[float, float]
    clearance: float


def radius_for_size(count: float, area_scale: float) -> float:
    """Radius whose disc area is count * area_scale."""
    if count < 1:
        raise GeometryError(f"element count must be >= 1, got {count}")
    if area_scale <= 0:
        raise GeometryError(f"area_scale must be positive, got {area_scale}")
    return math.sqrt(count * area_scale / math.pi)


def area_scale_for_canvas(sizes: Sequence[int], width: float, height: float) -> float:
    """Area units per element so the largest circle has radius min(w,h)/4."""
    if not sizes:
        raise GeometryError("no set sizes given")
    rmax = min(width, height) / 4.0
    return math.pi * rmax * rmax / max(sizes)


def lens_area(r1: float, r2: float, d: float) -> float:
    """Overlap area of two circles with radii r1, r2 at center distance d.

    Zero at or beyond external tangency; the full smaller disc at or inside
    internal tangency; the standard circular-lens expression between.
    """
    if r1 <= 0 or r2 <= 0:
        raise GeometryError(f"radii must be positive, got {r1}, {r2}")
    if d < 0:
        raise GeometryError(f"center distance must be >= 0, got {d}")
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    # Clamp acos arguments: float rounding can nudge them past +/-1 near tangency.
    a1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)
    a2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)
    a1 = min(1.0, max(-1.0, a1))
    a2 = min(1.0, max(-1.0, a2))
    k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    k = max(0.0, k)
    return r1 * r1 * math.acos(a1) + r2 * r2 * math.acos(a2) - 0.5 * math.sqrt(k)


def distance_for_overlap(r1: float, r2: float, target_area: float) -> float:
    """Invert lens_area: the center distance realizing target_area.

    lens_area is strictly decreasing in d on [|r1-r2|, r1+r2], so bisection
    converges to the unique root.
    """
    if r1 <= 0 or r2 <= 0:
        raise GeometryError(f"radii must be positive, got {r1}, {r2}")
    rm = min(r1, r2)
    cap = math.pi * rm * rm
    slack = _FEASIBLE_SLACK * cap
    if target_area < -slack or target_area > cap + slack:
        raise GeometryError(
            f"overlap area {target_area} infeasible for radii {r1}, {r2} (max {cap})"
        )
    if target_area <= 0.0:
        return r1 + r2
    if target_area >= cap:
        return abs(r1 - r2)
    lo = abs(r1 - r2)
    hi = r1 + r2
    tol = _BISECT_TOL * (r1 + r2)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lens_area(r1, r2, mid) > target_area:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def target_distance_matrix(
    table: RegionTable, sizes: Sequence[int], area_scale: float
) -> CircleModel:
    """Radii plus the pairwise center-distance targets for a region table.

    Disjoint pairs are pushed 10% beyond tangency and full containment 10%
    inside it, so both render unambiguously; all other pairs invert the lens.
    """
    if len(sizes) != table.n:
        raise GeometryError(f"expected {table.n} sizes, got {len(sizes)}")
    if any(c < 1 for c in sizes):
        raise GeometryError("set sizes must be >= 1")
    radii = tuple(radius_for_size(c, area_scale) for c in sizes)
    n = table.n
    target = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = radii[i], radii[j]
            c = len(table.inclusive.get((1 << i) | (1 << j), ()))
            if c == 0:
                t = 1.1 * (ri + rj)
            elif c == min(sizes[i], sizes[j]):
                t = 0.9 * abs(ri - rj)
            else:
                t = distance_for_overlap(ri, rj, c * area_scale)
            target[i][j] = t
            target[j][i] = t
    return CircleModel(
        radii=radii,
        target=tuple(tuple(row) for row in target),
        area_scale=area_scale,
    )


def polygonize_circle(center: tuple[float, float], radius: float, segments: int) -> Polygon:
    """Regular CCW polygon inscribed in the circle, vertex k at angle 2*pi*k/segments."""
    if segments < 3:
        raise GeometryError(f"segments must be >= 3, got {segments}")
    if radius <= 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    cx, cy = center
    ring = tuple(
        (
            cx + radius * math.cos(2.0 * math.pi * k / segments),
            cy + radius * math.sin(2.0 * math.pi * k / segments),
        )
        for k in range(segments)
    )
    return Polygon(rings=(ring,))


def _to_shapely(poly: Polygon) -> ShapelyPolygon:
    outers = [r for r in poly.rings if ring_area(r) > 0]
    holes = [r for r in poly.rings if ring_area(r) < 0]
    if len(outers) != 1:
        raise GeometryError("expected a single outer ring")
    return ShapelyPolygon(outers[0], holes)


def _from_shapely(geom) -> Polygon | None:
    if geom.is_empty:
        return None
    if isinstance(geom, ShapelyPolygon):
        parts = [geom]
    elif isinstance(geom, MultiPolygon):
        parts = list(geom.geoms)
    else:
        # Differences can leave line/point debris inside a collection.
        parts = [g for g in getattr(geom, "geoms", []) if isinstance(g, ShapelyPolygon)]
    rings: list[tuple[tuple[float, float], ...]] = []
    for part in parts:
        if part.is_empty or part.area < _AREA_EPS:
            continue
        part = orient(part, 1.0)
        rings.append(tuple((float(x), float(y)) for x, y in part.exterior.coords[:-1]))
        for hole in part.interiors:
            rings.append(tuple((float(x), float(y)) for x, y in hole.coords[:-1]))
    if not rings:
        return None
    return Polygon(rings=tuple(rings))


def region_polygons(
    circles: Sequence[Circle], masks: Iterable[int], segments: int = 256
) -> dict[int, Polygon]:
    """Exclusive-region polygons for each membership mask.

    Each region is the intersection of its member circles minus the union of
    the others; masks whose geometric result is empty are omitted.
    """
    shapes = [
        _to_shapely(polygonize_circle((c.x, c.y), c.r, segments)) for c in circles
    ]
    out: dict[int, Polygon] = {}
    for mask in masks:
        members = [i for i in range(len(circles)) if mask & (1 << i)]
        if not members:
            raise GeometryError("region mask selects no circles")
        geom = shapes[members[0]]
        for i in members[1:]:
            geom = geom.intersection(shapes[i])
            if geom.is_empty:
                break
        if geom.is_empty:
            continue
        for i in range(len(circles)):
            if not mask & (1 << i):
                geom = geom.difference(shapes[i])
                if geom.is_empty:
                    break
        poly = _from_shapely(geom)
        if poly is not None:
            out[mask] = poly
    return out


def ring_area(ring: Sequence[tuple[float, float]]) -> float:
    """Signed shoelace area; positive for CCW rings."""
    total = 0.0
    bx, by = ring[-1]
    for ax, ay in ring:
        total += bx * ay - ax * by
        bx, by = ax, ay
    return 0.5 * total


def polygon_area(poly: Polygon) -> float:
    """Net area: outer rings minus holes."""
    return sum(ring_area(r) for r in poly.rings)


def polygon_parts(poly: Polygon) -> list[Polygon]:
    """Split a multi-part polygon into connected parts (outer ring + its holes)."""
    outers = [r for r in poly.rings if ring_area(r) > 0]
    holes = [r for r in poly.rings if ring_area(r) < 0]
    parts: list[list[tuple[tuple[float, float], ...]]] = [[r] for r in outers]
    for hole in holes:
        px, py = hole[0]
        for i, outer in enumerate(outers):
            if _point_in_ring(px, py, outer):
                parts[i].append(hole)
                break
    return [Polygon(rings=tuple(rs)) for rs in parts]


def largest_part(poly: Polygon) -> Polygon:
    """The connected part with the largest net area (first wins on ties)."""
    parts = polygon_parts(poly)
    if not parts:
        raise GeometryError("polygon has no outer ring")
    best = parts[0]
    best_area = polygon_area(best)
    for p in parts[1:]:
        a = polygon_area(p)
        if a > best_area:
            best, best_area = p, a
    return best


def _point_in_ring(x: float, y: float, ring: Sequence[tuple[float, float]]) -> bool:
    inside = False
    bx, by = ring[-1]
    for ax, ay in ring:
        if (ay > y) != (by > y) and x < (bx - ax) * (y - ay) / (by - ay) + ax:
            inside = not inside
        bx, by = ax, ay
    return inside


class _EdgeSet:
    """Vectorized signed distance from a point to a polygon's rings."""

    def __init__(self, poly: Polygon):
        ax, ay, bx, by = [], [], [], []
        for ring in poly.rings:
            pts = np.asarray(ring, dtype=float)
            nxt = np.roll(pts, -1, axis=0)
            ax.append(pts[:, 0])
            ay.append(pts[:, 1])
            bx.append(nxt[:, 0])
            by.append(nxt[:, 1])
        self.ax = np.concatenate(ax)
        self.ay = np.concatenate(ay)
        self.bx = np.concatenate(bx)
        self.by = np.concatenate(by)
        self.dx = self.bx - self.ax
        self.dy = self.by - self.ay
        self.len_sq = self.dx * self.dx + self.dy * self.dy
        self.len_sq[self.len_sq == 0.0] = 1.0  # degenerate edges collapse to a point

    def signed_distance(self, x: float, y: float) -> float:
        t = ((x - self.ax) * self.dx + (y - self.ay) * self.dy) / self.len_sq
        t = np.clip(t, 0.0, 1.0)
        qx = self.ax + t * self.dx - x
        qy = self.ay + t * self.dy - y
        dist = math.sqrt(float(np.min(qx * qx + qy * qy)))

        crossing = (self.ay > y) != (self.by > y)
        if np.any(crossing):
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = (self.bx - self.ax) * (y - self.ay) / (self.by - self.ay) + self.ax
            inside = int(np.sum(crossing & (x < xi))) % 2 == 1
        else:
            inside = False
        return dist if inside else -dist


def _ring_centroid(ring: Sequence[tuple[float, float]]) -> tuple[float, float] | None:
    area = 0.0
    cx = 0.0
    cy = 0.0
    bx, by = ring[-1]
    for ax_, ay_ in ring:
        f = bx * ay_ - ax_ * by
        cx += (bx + ax_) * f
        cy += (by + ay_) * f
        area += 3.0 * f
        bx, by = ax_, ay_
    if area == 0.0:
        return None
    return cx / area, cy / area


def pole_of_inaccessibility(poly: Polygon, precision: float = 1.0) -> PolePlacement:
    """Grid-refinement search for the interior point farthest from any edge.

    Square cells over the bounding box are kept in a priority queue keyed by
    their best possible clearance (center clearance + half-diagonal); the best
    cell is subdivided until no cell can beat the incumbent by more than
    precision.  Seeded with the centroid and the bounding-box center.
    """
    if precision <= 0:
        raise GeometryError(f"precision must be positive, got {precision}")
    if not poly.rings or polygon_area(poly) <= 0:
        raise GeometryError("polygon area must be positive")

    xs = [p[0] for ring in poly.rings for p in ring]
    ys = [p[1] for ring in poly.rings for p in ring]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    width = max_x - min_x
    height = max_y - min_y
    cell_size = min(width, height)
    if cell_size == 0:
        raise GeometryError("polygon is degenerate (zero-width bounding box)")

    edges = _EdgeSet(poly)
    sqrt2 = math.sqrt(2.0)

    best_x = best_y = 0.0
    best_d = -math.inf

    def consider(x: float, y: float) -> float:
        nonlocal best_x, best_y, best_d
        d = edges.signed_distance(x, y)
        if d > best_d:
            best_x, best_y, best_d = x, y, d
        return d

    centroid = _ring_centroid(poly.rings[0])
    if centroid is not None:
        consider(*centroid)
    consider(min_x + width / 2.0, min_y + height / 2.0)

    queue: list[tuple[float, int, float, float, float]] = []
    counter = 0
    h = cell_size / 2.0
    x = min_x
    while x < max_x:
        y = min_y
        while y < max_y:
            cx, cy = x + h, y + h
            d = consider(cx, cy)
            heapq.heappush(queue, (-(d + h * sqrt2), counter, cx, cy, h))
            counter += 1
            y += cell_size
        x += cell_size

    h_floor = cell_size * 1e-12
    while queue:
        neg_potential, _, cx, cy, h = heapq.heappop(queue)
        # Drill past the precision margin while the incumbent is still outside.
        margin = precision if best_d > 0.0 else 0.0
        if -neg_potential - best_d <= margin:
            continue
        if h < h_floor:
            continue
        h /= 2.0
        for dx_ in (-h, h):
            for dy_ in (-h, h):
                nx, ny = cx + dx_, cy + dy_
                d = consider(nx, ny)
                heapq.heappush(queue, (-(d + h * sqrt2), counter, nx, ny, h))
                counter += 1

    return PolePlacement(point=(best_x, best_y), clearance=best_d)
