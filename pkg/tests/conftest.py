"""Shared helpers: random geometry and independent oracle predicates.

The oracles here deliberately re-derive everything from the line
equations (numeric probe for the half-plane signs, dense sampling for
sinusoid intersections) so they share no code path with the library's
predicates.
"""

import math

import numpy as np
import pytest

from sectorindex.geometry import AngularSector, Point, Rect, sector_from_pose
from sectorindex.sectors import SectorSet


def rand_sector(rng, span=10_000.0, max_angle_deg=10.0) -> AngularSector:
    apex = Point(rng.uniform(0, span), rng.uniform(0, span))
    direction = rng.uniform(0, 2 * math.pi)
    angle = rng.uniform(1e-4, max_angle_deg * math.pi / 180.0)
    return sector_from_pose(apex, direction, angle)


def rand_sector_set(rng, n, span=10_000.0, mean_deg=0.952, max_deg=10.0) -> SectorSet:
    ax = rng.uniform(0, span, n)
    ay = rng.uniform(0, span, n)
    d = rng.uniform(0, 2 * math.pi, n)
    a = np.minimum(rng.exponential(mean_deg * math.pi / 180, n),
                   max_deg * math.pi / 180 - 1e-9) + 1e-9
    return SectorSet(np.arange(n), ax, ay, d, a)


def oracle_point_in_mono(p: Point, s: AngularSector) -> bool:
    """Independent containment test: half-plane residuals from the stored
    line equations, signs fixed by probing a point deep inside the wedge."""
    probe = Point(s.apex.x + math.cos(s.direction), s.apex.y + math.sin(s.direction))
    eps = 1e-9 * max(1.0, abs(p.x), abs(p.y), abs(s.apex.x), abs(s.apex.y))
    for line in (s.lower, s.upper):
        c, si = math.cos(line.theta), math.sin(line.theta)
        sign = 1.0 if probe.x * c + probe.y * si - line.rho >= 0.0 else -1.0
        if sign * (p.x * c + p.y * si - line.rho) < -eps:
            return False
    return True


def oracle_point_in_bi(p: Point, s: AngularSector) -> bool:
    mirrored = Point(2 * s.apex.x - p.x, 2 * s.apex.y - p.y)
    return oracle_point_in_mono(p, s) or oracle_point_in_mono(mirrored, s)


def sampling_sinusoid_hit(a: float, b: float, r: Rect, step: float = 1e-5):
    """Dense-sampling oracle for sinusoid/rectangle intersection.

    Returns (hit, margin): margin measures how decisively — the deepest
    penetration into the rho range when hit, or the closest approach when
    missed. Tangency candidates have a small margin.
    """
    thetas = np.arange(r.min_x, r.max_x, step)
    thetas = np.append(thetas, r.max_x)
    rho = a * np.cos(thetas) + b * np.sin(thetas)
    inside = (rho >= r.min_y) & (rho <= r.max_y)
    if inside.any():
        depth = np.minimum(rho - r.min_y, r.max_y - rho)
        return True, float(np.max(depth[inside]))
    below = np.maximum(r.min_y - rho, 0.0)
    above = np.maximum(rho - r.max_y, 0.0)
    return False, float(np.min(below + above))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
