"""Affine and polar dual transforms between primal points/lines and their
dual counterparts, plus the dual-space predicates used by the indexes.

Affine: a non-vertical line ``y = a*x + b`` maps to the dual point
``(a, -b)``; a point ``(x, y)`` maps to the dual line ``y = x*u - y`` over
slope/intercept space. A second affine space over ``x = m*y + n`` covers
steep lines. Polar: a line in Hesse normal form maps to the point
``(theta, rho)`` and a point to the sinusoid ``rho(t) = x*cos t + y*sin t``.

A sector's two boundary-line duals bound an arc of the apex sinusoid
(polar) or a straight segment (affine); the index stores their bounding
rectangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidRect
from .geometry import (
    EPS_SCALE,
    AngularSector,
    HALF_PI,
    NormalLine,
    Point,
    Rect,
    SlopeLine,
)

AFFINE_H = "affine-H"
AFFINE_V = "affine-V"
POLAR = "polar"

#: Padding applied to zero-height footprint rectangles (apex at origin).
PAD_SCALE = 1e-12


@dataclass(frozen=True, slots=True)
class DualPoint:
    u: float
    v: float
    space: str


@dataclass(frozen=True, slots=True)
class Sinusoid:
    """Dual of the primal point (a, b): rho(theta) = a*cos + b*sin."""

    a: float
    b: float

    @property
    def amplitude(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def phase(self) -> float:
        return math.atan2(self.b, self.a)

    def value(self, theta: float) -> float:
        return self.a * math.cos(theta) + self.b * math.sin(theta)


@dataclass(frozen=True, slots=True)
class DualSectorFootprint:
    rects: tuple[Rect, ...]
    wrapped: bool
    space: str


def affine_dual_line(line: SlopeLine) -> DualPoint:
    space = AFFINE_H if line.orientation == "y-of-x" else AFFINE_V
    return DualPoint(line.slope, -line.intercept, space)


def affine_dual_point(p: Point, space: str) -> SlopeLine:
    if space == AFFINE_H:
        return SlopeLine("y-of-x", p.x, -p.y)
    if space == AFFINE_V:
        return SlopeLine("x-of-y", p.y, -p.x)
    raise ValueError(f"unknown affine space {space!r}")


def polar_dual_line(line: NormalLine) -> DualPoint:
    return DualPoint(line.theta, line.rho, POLAR)


def polar_dual_point(p: Point) -> Sinusoid:
    return Sinusoid(p.x, p.y)


def to_slope_h(line: NormalLine) -> SlopeLine | None:
    """``y = a*x + b`` form, or None for an exactly vertical line."""
    s = math.sin(line.theta)
    if s == 0.0:
        return None
    return SlopeLine("y-of-x", -math.cos(line.theta) / s, line.rho / s)


def to_slope_v(line: NormalLine) -> SlopeLine | None:
    """``x = m*y + n`` form, or None for an exactly horizontal line."""
    c = math.cos(line.theta)
    if c == 0.0:
        return None
    return SlopeLine("x-of-y", -math.sin(line.theta) / c, line.rho / c)


def _theta_candidates(base: float) -> tuple[float, float, float]:
    return base - 2.0 * math.pi, base, base + 2.0 * math.pi


def sinusoid_rect_intersects(sin: Sinusoid, r: Rect) -> bool:
    """True iff the sinusoid meets the closed polar rectangle.

    O(1) decision from the ``A*cos(theta - alpha)`` form: the two images of
    the rectangle's theta bounds, the interior extremum when its theta
    falls inside, and the inverse images of the rho bounds (both acos
    branches, shifted by 2*pi into [0, pi]).
    """
    if not (0.0 <= r.min_x and r.max_x <= math.pi):
        raise InvalidRect(f"theta range [{r.min_x}, {r.max_x}] outside [0, pi]")
    amp = sin.amplitude
    eps_r = EPS_SCALE * max(1.0, amp)
    rho_lo = r.min_y - eps_r
    rho_hi = r.max_y + eps_r
    if amp == 0.0:
        return rho_lo <= 0.0 <= rho_hi
    alpha = sin.phase

    img_lo = amp * math.cos(r.min_x - alpha)
    img_hi = amp * math.cos(r.max_x - alpha)
    if rho_lo <= img_lo <= rho_hi or rho_lo <= img_hi <= rho_hi:
        return True
    if (img_lo < rho_lo) != (img_hi < rho_lo):
        # images straddle the whole rho band; the crossing is inside the
        # theta range regardless of an interior extremum
        return True

    theta_c = alpha % math.pi
    extremum = amp if math.cos(theta_c - alpha) > 0.0 else -amp
    if r.min_x < theta_c < r.max_x and rho_lo <= extremum <= rho_hi:
        return True

    eps_t = 1e-12
    for bound in (r.min_y, r.max_y):
        ratio = bound / amp
        if abs(ratio) > 1.0 + eps_t:
            continue
        c = math.acos(max(-1.0, min(1.0, ratio)))
        for base in (alpha + c, alpha - c):
            for theta in _theta_candidates(base):
                if r.min_x - eps_t <= theta <= r.max_x + eps_t:
                    return True
    return False


def sector_theta_span(s: AngularSector) -> tuple[float, float]:
    """Unwrapped dual arc span: start in [0, pi), end = start + angle.

    An end beyond pi means the sector straddles the vertical direction and
    its dual arc is the complementary two-piece arc.
    """
    e1 = s.direction - 0.5 * s.angle
    t1 = (e1 + HALF_PI) % math.pi
    if t1 >= math.pi:  # fp rounding of tiny negative inputs
        t1 -= math.pi
    return t1, t1 + s.angle


def sector_wraps_vertical(s: AngularSector) -> bool:
    _, t2 = sector_theta_span(s)
    return t2 > math.pi


def _arc_piece_rect(apex_sin: Sinusoid, lo: float, hi: float) -> Rect:
    v_lo = apex_sin.value(lo)
    v_hi = apex_sin.value(hi)
    r_lo = min(v_lo, v_hi)
    r_hi = max(v_lo, v_hi)
    amp = apex_sin.amplitude
    theta_c = apex_sin.phase % math.pi
    if lo < theta_c < hi:
        extremum = amp if math.cos(theta_c - apex_sin.phase) > 0.0 else -amp
        r_lo = min(r_lo, extremum)
        r_hi = max(r_hi, extremum)
    if r_hi == r_lo:
        pad = PAD_SCALE * max(1.0, abs(r_lo))
        r_lo -= pad
        r_hi += pad
    return Rect(lo, r_lo, hi, r_hi)


def polar_sector_footprint(s: AngularSector) -> DualSectorFootprint:
    """Bounding rectangle(s) of the sector's dual arc on the apex sinusoid.

    Non-straddling sectors give one rectangle over the arc's theta span,
    with the rho range widened to the sinusoid extremum when its theta lies
    strictly inside. Straddling sectors give two rectangles, spanning
    [theta_lower, pi] and [0, theta_upper].
    """
    apex_sin = polar_dual_point(s.apex)
    t1, t2 = sector_theta_span(s)
    if t2 <= math.pi:
        return DualSectorFootprint((_arc_piece_rect(apex_sin, t1, t2),), False, POLAR)
    return DualSectorFootprint(
        (
            _arc_piece_rect(apex_sin, t1, math.pi),
            _arc_piece_rect(apex_sin, 0.0, t2 - math.pi),
        ),
        True,
        POLAR,
    )


def _segment_mbr(p: DualPoint, q: DualPoint) -> Rect:
    return Rect(min(p.u, q.u), min(p.v, q.v), max(p.u, q.u), max(p.v, q.v))


def affine_sector_choice(
    s: AngularSector,
) -> tuple[str, Rect, tuple[DualPoint, DualPoint]]:
    """Pick the affine space (H or V) whose dual segment is shorter.

    Returns the tree id, the segment's bounding rectangle and the two dual
    points. A space where a boundary line has no slope form is skipped;
    equal lengths go to H.
    """
    h1 = to_slope_h(s.lower)
    h2 = to_slope_h(s.upper)
    v1 = to_slope_v(s.lower)
    v2 = to_slope_v(s.upper)

    ph = pv = None
    dist_h = dist_v = math.inf
    if h1 is not None and h2 is not None:
        ph = (affine_dual_line(h1), affine_dual_line(h2))
        dist_h = math.hypot(ph[0].u - ph[1].u, ph[0].v - ph[1].v)
        if math.isnan(dist_h):
            dist_h = math.inf
    if v1 is not None and v2 is not None:
        pv = (affine_dual_line(v1), affine_dual_line(v2))
        dist_v = math.hypot(pv[0].u - pv[1].u, pv[0].v - pv[1].v)
        if math.isnan(dist_v):
            dist_v = math.inf

    if ph is not None and (pv is None or dist_h <= dist_v):
        return "H", _segment_mbr(*ph), ph
    if pv is None:
        raise ValueError("sector boundary lines admit no affine dual form")
    return "V", _segment_mbr(*pv), pv
