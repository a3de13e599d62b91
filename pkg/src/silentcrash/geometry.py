"""Oriented-bounding-box primitives: the unit of all contact math.

Every actor footprint is a planar rectangle given by center, half extents and
yaw. The boolean overlap test runs the separating-axis theorem over the four
face normals; the intersection area clips one quad against the other's
half-planes. The two routes are deliberately independent so they can be
cross-checked against each other and against a Monte-Carlo membership oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Areas at or below this threshold count as "no contact". Gives the zero
# overlap threshold of the scenario oracle a strict-inequality meaning.
AREA_EPSILON = 1e-9

_TWO_PI = 2.0 * math.pi


def normalize_yaw(yaw: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    return (yaw + math.pi) % _TWO_PI - math.pi


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class OrientedBox:
    """Planar rigid footprint: center, half extents along body axes, yaw."""

    center: Point2
    half_length: float
    half_width: float
    yaw: float

    def __post_init__(self) -> None:
        if not (self.half_length > 0.0 and self.half_width > 0.0):
            raise ValueError("half extents must be positive")
        if not all(math.isfinite(v) for v in (self.half_length, self.half_width, self.yaw)):
            raise ValueError("non-finite box parameter")
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))


def area(box: OrientedBox) -> float:
    return 4.0 * box.half_length * box.half_width


def _body_axes(box: OrientedBox) -> tuple[tuple[float, float], tuple[float, float]]:
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    return (c, s), (-s, c)


def corners(box: OrientedBox) -> tuple[Point2, Point2, Point2, Point2]:
    """Corner points of the box in counter-clockwise order."""
    (ux, uy), (vx, vy) = _body_axes(box)
    hl, hw = box.half_length, box.half_width
    cx, cy = box.center.x, box.center.y
    # local CCW order: (+hl,+hw), (-hl,+hw), (-hl,-hw), (+hl,-hw)
    offsets = ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
    return tuple(
        Point2(cx + a * ux + b * vx, cy + a * uy + b * vy) for a, b in offsets
    )


def _axis_overlaps(a: OrientedBox, b: OrientedBox) -> list[float]:
    """Signed projection overlap along the four face normals.

    A negative entry means the boxes are separated along that axis; the
    minimum entry, clamped at zero, is the minimum translation distance.
    """
    ua, va = _body_axes(a)
    ub, vb = _body_axes(b)
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    out = []
    for ax, ay in (ua, va, ub, vb):
        ra = a.half_length * abs(ax * ua[0] + ay * ua[1]) + a.half_width * abs(ax * va[0] + ay * va[1])
        rb = b.half_length * abs(ax * ub[0] + ay * ub[1]) + b.half_width * abs(ax * vb[0] + ay * vb[1])
        out.append(ra + rb - abs(ax * dx + ay * dy))
    return out


def overlaps(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis test: true iff interiors or boundaries intersect."""
    return min(_axis_overlaps(a, b)) >= 0.0


def penetration_depth(a: OrientedBox, b: OrientedBox) -> float:
    """Minimum translation distance separating the boxes; 0 if disjoint."""
    m = min(_axis_overlaps(a, b))
    return m if m > 0.0 else 0.0


def _clip_polygon(points: list[tuple[float, float]], quad: tuple[Point2, ...]) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of `points` against a CCW quad's half-planes."""
    for i in range(4):
        if not points:
            return []
        px, py = quad[i].x, quad[i].y
        qx, qy = quad[(i + 1) % 4].x, quad[(i + 1) % 4].y
        ex, ey = qx - px, qy - py
        clipped: list[tuple[float, float]] = []
        prev = points[-1]
        prev_side = ex * (prev[1] - py) - ey * (prev[0] - px)
        for cur in points:
            cur_side = ex * (cur[1] - py) - ey * (cur[0] - px)
            if cur_side >= 0.0:
                if prev_side < 0.0:
                    clipped.append(_edge_intersection(prev, cur, prev_side, cur_side))
                clipped.append(cur)
            elif prev_side >= 0.0:
                clipped.append(_edge_intersection(prev, cur, prev_side, cur_side))
            prev, prev_side = cur, cur_side
        points = clipped
    return points


def _edge_intersection(p, q, sp, sq) -> tuple[float, float]:
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _shoelace(points: list[tuple[float, float]]) -> float:
    if len(points) < 3:
        return 0.0
    acc = 0.0
    for i, (x0, y0) in enumerate(points):
        x1, y1 = points[(i + 1) % len(points)]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def intersection_area(a: OrientedBox, b: OrientedBox) -> float:
    """Area of the convex intersection polygon, in square meters."""
    poly = [(p.x, p.y) for p in corners(a)]
    return _shoelace(_clip_polygon(poly, corners(b)))


def iou(a: OrientedBox, b: OrientedBox) -> float:
    inter = intersection_area(a, b)
    union = area(a) + area(b) - inter
    value = inter / union
    return min(max(value, 0.0), 1.0)


def center_distance(a: OrientedBox, b: OrientedBox) -> float:
    return math.hypot(b.center.x - a.center.x, b.center.y - a.center.y)
