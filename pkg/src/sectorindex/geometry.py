"""Primal 2D geometry: points, lines, angular sectors, rectangles.

Lines are kept in Hesse normal form ``x*cos(theta) + y*sin(theta) = rho``
with ``theta`` in [0, pi), which represents vertical lines without special
cases. Slope/intercept forms only appear at the affine-dual boundary.

All containment predicates are closed-set tests with a scaled absolute
tolerance, so points exactly on a boundary are deterministically inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateInput, InvalidRect

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

#: Relative scale of the closed-predicate tolerance.
EPS_SCALE = 1e-9


def eps_geom(*values: float) -> float:
    """Absolute tolerance for predicates involving the given magnitudes."""
    m = 1.0
    for v in values:
        a = abs(v)
        if a > m:
            m = a
    return EPS_SCALE * m


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DegenerateInput(f"non-finite point ({self.x}, {self.y})")

    def reflect_through(self, center: "Point") -> "Point":
        return Point(2.0 * center.x - self.x, 2.0 * center.y - self.y)


def _canonical_theta_rho(theta: float, rho: float) -> tuple[float, float]:
    """Reduce theta into [0, pi), flipping rho's sign per removed half-turn."""
    t = theta % math.pi
    if t >= math.pi:  # fp rounding of tiny negative inputs
        t = 0.0
    half_turns = round((theta - t) / math.pi)
    if half_turns % 2:
        rho = -rho
    return t, rho


@dataclass(frozen=True, slots=True)
class NormalLine:
    """Line ``x*cos(theta) + y*sin(theta) = rho``, theta in [0, pi)."""

    theta: float
    rho: float

    def __post_init__(self):
        t, r = _canonical_theta_rho(self.theta, self.rho)
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "rho", r)

    @classmethod
    def from_coefficients(cls, a: float, b: float, c: float) -> "NormalLine":
        """Line ``a*x + b*y = c`` in normal form."""
        norm = math.hypot(a, b)
        if norm == 0.0:
            raise DegenerateInput("zero normal vector does not define a line")
        return cls(math.atan2(b, a), c / norm)

    def residual(self, p: Point) -> float:
        """Signed distance-like value; zero iff ``p`` is on the line."""
        return p.x * math.cos(self.theta) + p.y * math.sin(self.theta) - self.rho

    def slope_angle(self) -> float:
        """Direction angle of the line in [0, pi)."""
        return (self.theta + HALF_PI) % math.pi


@dataclass(frozen=True, slots=True)
class SlopeLine:
    """Slope/intercept line, either ``y = slope*x + intercept`` (y-of-x)
    or ``x = slope*y + intercept`` (x-of-y)."""

    orientation: str  # "y-of-x" | "x-of-y"
    slope: float
    intercept: float

    def __post_init__(self):
        if self.orientation not in ("y-of-x", "x-of-y"):
            raise DegenerateInput(f"unknown orientation {self.orientation!r}")
        if not math.isfinite(self.slope):
            raise DegenerateInput("slope must be finite")

    def to_normal(self) -> NormalLine:
        if self.orientation == "y-of-x":
            # slope*x - y = -intercept
            return NormalLine.from_coefficients(self.slope, -1.0, -self.intercept)
        # x - slope*y = intercept
        return NormalLine.from_coefficients(1.0, -self.slope, self.intercept)


@dataclass(frozen=True, slots=True)
class AngularSector:
    """Unbounded wedge: half-plane above ``lower`` meets half-plane below
    ``upper``, both lines through ``apex``.

    ``direction`` is the bisector heading of the mono wedge in [0, 2*pi),
    ``angle`` the opening in (0, pi). The wedge spans slope angles
    ``direction - angle/2`` to ``direction + angle/2``.
    """

    apex: Point
    lower: NormalLine
    upper: NormalLine
    angle: float
    direction: float

    @property
    def edge_angles(self) -> tuple[float, float]:
        half = 0.5 * self.angle
        return self.direction - half, self.direction + half


@dataclass(frozen=True, slots=True)
class Rect:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if not (self.min_x <= self.max_x and self.min_y <= self.max_y):
            raise InvalidRect(
                f"inverted bounds ({self.min_x}, {self.min_y}, "
                f"{self.max_x}, {self.max_y})"
            )

    def area(self) -> float:
        return (self.max_x - self.min_x) * (self.max_y - self.min_y)

    def contains_point(self, x: float, y: float, eps: float = 0.0) -> bool:
        return (
            self.min_x - eps <= x <= self.max_x + eps
            and self.min_y - eps <= y <= self.max_y + eps
        )

    def intersection_area(self, other: "Rect") -> float:
        w = min(self.max_x, other.max_x) - max(self.min_x, other.min_x)
        h = min(self.max_y, other.max_y) - max(self.min_y, other.min_y)
        if w <= 0.0 or h <= 0.0:
            return 0.0
        return w * h


def line_from_two_points(p: Point, q: Point) -> NormalLine:
    dx = q.x - p.x
    dy = q.y - p.y
    if dx == 0.0 and dy == 0.0:
        raise DegenerateInput("coincident points do not define a line")
    # normal (-dy, dx), offset fixed by p
    return NormalLine.from_coefficients(-dy, dx, -dy * p.x + dx * p.y)


def line_through_point_at_angle(p: Point, slope_angle: float) -> NormalLine:
    """Line through ``p`` whose direction makes ``slope_angle`` with +x."""
    nx = -math.sin(slope_angle)
    ny = math.cos(slope_angle)
    return NormalLine.from_coefficients(nx, ny, nx * p.x + ny * p.y)


def sector_from_pose(apex: Point, direction_rad: float, angle_rad: float) -> AngularSector:
    """Sector from apex, bisector heading and opening angle."""
    if not 0.0 < angle_rad < math.pi:
        raise DegenerateInput(f"sector angle must be in (0, pi), got {angle_rad}")
    direction = direction_rad % TWO_PI
    half = 0.5 * angle_rad
    lower = line_through_point_at_angle(apex, direction - half)
    upper = line_through_point_at_angle(apex, direction + half)
    return AngularSector(apex, lower, upper, angle_rad, direction)


def _wedge_sign(line: NormalLine, direction: float) -> float:
    # Sign of the residual at apex + ray(direction); nonzero because the
    # bisector is angle/2 > 0 away from both boundary lines.
    return 1.0 if math.cos(line.theta - direction) >= 0.0 else -1.0


def point_in_mono_sector(p: Point, s: AngularSector) -> bool:
    eps = eps_geom(p.x, p.y, s.apex.x, s.apex.y)
    r1 = s.lower.residual(p)
    if _wedge_sign(s.lower, s.direction) * r1 < -eps:
        return False
    r2 = s.upper.residual(p)
    return _wedge_sign(s.upper, s.direction) * r2 >= -eps


def point_in_bi_sector(p: Point, s: AngularSector) -> bool:
    return point_in_mono_sector(p, s) or point_in_mono_sector(
        p.reflect_through(s.apex), s
    )


def line_intersects_rect(line: NormalLine, r: Rect) -> bool:
    """Closed test: mixed corner signs (or a near-zero corner) means hit."""
    c = math.cos(line.theta)
    s = math.sin(line.theta)
    eps = eps_geom(r.min_x, r.min_y, r.max_x, r.max_y, line.rho)
    lo = math.inf
    hi = -math.inf
    for x in (r.min_x, r.max_x):
        for y in (r.min_y, r.max_y):
            d = x * c + y * s - line.rho
            lo = min(lo, d)
            hi = max(hi, d)
    return lo <= eps and hi >= -eps


def rect_area_sum(rects: Iterable[Rect]) -> float:
    return sum(r.area() for r in rects)


def _cover_grid(rects: Sequence[Rect]):
    """Coordinate-compressed cells with per-cell cover count (small inputs)."""
    xs = sorted({r.min_x for r in rects} | {r.max_x for r in rects})
    ys = sorted({r.min_y for r in rects} | {r.max_y for r in rects})
    for i in range(len(xs) - 1):
        w = xs[i + 1] - xs[i]
        if w == 0.0:
            continue
        mx = 0.5 * (xs[i] + xs[i + 1])
        for j in range(len(ys) - 1):
            h = ys[j + 1] - ys[j]
            if h == 0.0:
                continue
            my = 0.5 * (ys[j] + ys[j + 1])
            count = sum(
                1
                for r in rects
                if r.min_x <= mx <= r.max_x and r.min_y <= my <= r.max_y
            )
            if count:
                yield w * h, count


def rect_union_area(rects: Sequence[Rect]) -> float:
    if not rects:
        return 0.0
    return sum(a for a, _ in _cover_grid(rects))


def rect_multi_covered_area(rects: Sequence[Rect]) -> float:
    """Area covered by two or more rectangles."""
    if len(rects) < 2:
        return 0.0
    return sum(a for a, n in _cover_grid(rects) if n >= 2)


def rect_pairwise_intersection_sum(rects: Sequence[Rect]) -> float:
    total = 0.0
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            total += rects[i].intersection_area(rects[j])
    return total


def truncate_sector_polygon(s: AngularSector, radius: float) -> list[Point]:
    """Polygon standing in for the mono wedge cut at ``radius``.

    Angles up to pi/2 give the plain triangle (apex, two edge-ray tips).
    Wider sectors add arc points at the interior axis directions and the
    bisector, so the polygon's bounding box still covers the whole
    truncated wedge.
    """
    if radius <= 0.0:
        raise DegenerateInput(f"radius must be positive, got {radius}")
    e1, e2 = s.edge_angles
    arc = [e1]
    if s.angle > HALF_PI:
        k = math.floor(e1 / HALF_PI) + 1
        while k * HALF_PI < e2:
            if k * HALF_PI > e1:
                arc.append(k * HALF_PI)
            k += 1
        arc.append(s.direction)
        arc = sorted(set(arc))
    arc.append(e2)
    pts = [s.apex]
    pts.extend(
        Point(s.apex.x + radius * math.cos(a), s.apex.y + radius * math.sin(a))
        for a in arc
    )
    return pts
