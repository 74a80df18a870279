import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectorindex.errors import DegenerateInput, InvalidRect
from sectorindex.geometry import (
    NormalLine,
    Point,
    Rect,
    SlopeLine,
    line_from_two_points,
    line_intersects_rect,
    point_in_bi_sector,
    point_in_mono_sector,
    rect_area_sum,
    rect_multi_covered_area,
    rect_pairwise_intersection_sum,
    rect_union_area,
    sector_from_pose,
    truncate_sector_polygon,
)

from conftest import rand_sector

coords = st.floats(-1e6, 1e6, allow_nan=False)


class TestNormalLine:
    def test_x_axis(self):
        line = line_from_two_points(Point(0, 0), Point(1, 0))
        assert line.theta == pytest.approx(math.pi / 2)
        assert line.rho == pytest.approx(0.0, abs=1e-15)

    def test_vertical(self):
        line = line_from_two_points(Point(2, 0), Point(2, 5))
        assert line.theta == pytest.approx(0.0, abs=1e-15)
        assert line.rho == pytest.approx(2.0)

    def test_diagonal(self):
        line = line_from_two_points(Point(0, 1), Point(1, 0))
        assert line.theta == pytest.approx(math.pi / 4)
        assert line.rho == pytest.approx(1 / math.sqrt(2))

    def test_coincident_points(self):
        with pytest.raises(DegenerateInput):
            line_from_two_points(Point(3, 3), Point(3, 3))

    def test_canonical_range(self):
        line = NormalLine(math.pi + 0.3, 2.0)  # same line, flipped offset
        assert line.theta == pytest.approx(0.3)
        assert line.rho == pytest.approx(-2.0)
        assert 0.0 <= NormalLine(-0.5, 1.0).theta < math.pi

    @given(x1=coords, y1=coords, x2=coords, y2=coords)
    @settings(max_examples=200)
    def test_both_points_on_line(self, x1, y1, x2, y2):
        if x1 == x2 and y1 == y2:
            return
        line = line_from_two_points(Point(x1, y1), Point(x2, y2))
        for x, y in ((x1, y1), (x2, y2)):
            res = abs(x * math.cos(line.theta) + y * math.sin(line.theta) - line.rho)
            assert res < 1e-9 * max(1.0, abs(x), abs(y))


class TestSectorFromPose:
    def test_symmetric_wedge(self):
        s = sector_from_pose(Point(0, 0), 0.0, math.pi / 2)
        e1, e2 = s.edge_angles
        assert e1 == pytest.approx(-math.pi / 4)
        assert e2 == pytest.approx(math.pi / 4)

    def test_edge_lines(self):
        s = sector_from_pose(Point(1, 0), math.pi / 8, math.pi / 4)
        # lower edge: the x-axis through (1, 0); upper: slope 1 through (1, 0)
        assert s.lower.theta == pytest.approx(math.pi / 2)
        assert s.lower.rho == pytest.approx(0.0, abs=1e-15)
        assert s.upper.slope_angle() == pytest.approx(math.pi / 4)

    def test_vertical_bisector(self):
        s = sector_from_pose(Point(0, 0), math.pi / 2, 0.2)
        e1, e2 = s.edge_angles
        assert e1 < math.pi / 2 < e2

    @pytest.mark.parametrize("angle", [0.0, -0.1, math.pi, 4.0])
    def test_bad_angle(self, angle):
        with pytest.raises(DegenerateInput):
            sector_from_pose(Point(0, 0), 0.0, angle)

    def test_lines_pass_through_apex(self, rng):
        for _ in range(200):
            s = rand_sector(rng)
            for line in (s.lower, s.upper):
                res = abs(
                    s.apex.x * math.cos(line.theta)
                    + s.apex.y * math.sin(line.theta)
                    - line.rho
                )
                assert res < 1e-9 * max(1.0, abs(s.apex.x), abs(s.apex.y))


class TestContainment:
    def setup_method(self):
        self.s = sector_from_pose(Point(1, 0), math.pi / 8, math.pi / 4)

    def test_inside(self):
        assert point_in_mono_sector(Point(2, 0.5), self.s)

    def test_outside_left(self):
        assert not point_in_mono_sector(Point(0, 0.5), self.s)

    def test_apex_inside(self):
        assert point_in_mono_sector(Point(1, 0), self.s)

    def test_bi_reflection(self):
        assert point_in_bi_sector(Point(0, -0.5), self.s)

    def test_bi_includes_mono(self):
        assert point_in_bi_sector(Point(2, 0.5), self.s)

    def test_bi_outside(self):
        assert not point_in_bi_sector(Point(1, 5), self.s)

    def test_mono_implies_bi(self, rng):
        for _ in range(500):
            s = rand_sector(rng)
            p = Point(rng.uniform(0, 10_000), rng.uniform(0, 10_000))
            if point_in_mono_sector(p, s):
                assert point_in_bi_sector(p, s)

    def test_bi_reflection_invariant(self, rng):
        for _ in range(500):
            s = rand_sector(rng)
            p = Point(rng.uniform(0, 10_000), rng.uniform(0, 10_000))
            q = p.reflect_through(s.apex)
            assert point_in_bi_sector(p, s) == point_in_bi_sector(q, s)

    def test_boundary_points_inside_bi(self, rng):
        # closed sectors: any point on a boundary line is in the bi-sector
        for _ in range(500):
            s = rand_sector(rng)
            line = s.lower if rng.random() < 0.5 else s.upper
            t = rng.uniform(-1000, 1000)
            # param point on the line via its direction vector
            dx, dy = -math.sin(line.theta), math.cos(line.theta)
            px = s.apex.x + t * dx
            py = s.apex.y + t * dy
            assert point_in_bi_sector(Point(px, py), s)


class TestLineRect:
    def test_straddle(self):
        assert line_intersects_rect(NormalLine(math.pi / 2, 0.0), Rect(-1, -1, 1, 1))

    def test_miss(self):
        assert not line_intersects_rect(
            NormalLine(math.pi / 2, 0.0), Rect(0.5, 0.5, 1, 1)
        )

    def test_edge_tangency(self):
        assert line_intersects_rect(NormalLine(0.0, 1.0), Rect(1, 0, 2, 1))


class TestRectAreas:
    def test_disjoint(self):
        rects = [Rect(0, 0, 1, 1), Rect(2, 2, 3, 3)]
        assert rect_area_sum(rects) == pytest.approx(2.0)
        assert rect_union_area(rects) == pytest.approx(2.0)

    def test_identical(self):
        rects = [Rect(0, 0, 1, 1), Rect(0, 0, 1, 1)]
        assert rect_area_sum(rects) == pytest.approx(2.0)
        assert rect_union_area(rects) == pytest.approx(1.0)
        assert rect_multi_covered_area(rects) == pytest.approx(1.0)
        assert rect_pairwise_intersection_sum(rects) == pytest.approx(1.0)

    def test_empty(self):
        assert rect_area_sum([]) == 0.0
        assert rect_union_area([]) == 0.0

    def test_invalid_rect(self):
        with pytest.raises(InvalidRect):
            Rect(1, 0, 0, 1)

    def test_union_vs_montecarlo(self, rng):
        for _ in range(20):
            rects = []
            for _ in range(rng.integers(1, 7)):
                x = sorted(rng.uniform(0, 10, 2))
                y = sorted(rng.uniform(0, 10, 2))
                rects.append(Rect(x[0], y[0], x[1], y[1]))
            xs = rng.uniform(0, 10, 20_000)
            ys = rng.uniform(0, 10, 20_000)
            counts = np.zeros(len(xs), dtype=int)
            for r in rects:
                counts += (
                    (xs >= r.min_x) & (xs <= r.max_x)
                    & (ys >= r.min_y) & (ys <= r.max_y)
                )
            mc_union = 100.0 * np.mean(counts >= 1)
            mc_multi = 100.0 * np.mean(counts >= 2)
            assert rect_union_area(rects) == pytest.approx(mc_union, abs=1.5)
            assert rect_multi_covered_area(rects) == pytest.approx(mc_multi, abs=1.5)


class TestTruncation:
    def test_right_angle_triangle(self):
        s = sector_from_pose(Point(0, 0), 0.0, math.pi / 2)
        poly = truncate_sector_polygon(s, 1.0)
        assert len(poly) == 3
        r2 = math.sqrt(2) / 2
        assert poly[0] == Point(0, 0)
        assert poly[1].x == pytest.approx(r2) and poly[1].y == pytest.approx(-r2)
        assert poly[2].x == pytest.approx(r2) and poly[2].y == pytest.approx(r2)

    def test_mbr_bound(self, rng):
        for _ in range(50):
            s = rand_sector(rng, max_angle_deg=179.0)
            poly = truncate_sector_polygon(s, 1e8)
            xs = [p.x for p in poly]
            ys = [p.y for p in poly]
            assert max(xs) - min(xs) <= 2e8 * (1 + 1e-12)
            assert max(ys) - min(ys) <= 2e8 * (1 + 1e-12)

    def test_example_radius_two(self):
        s = sector_from_pose(Point(1, 0), math.pi / 8, math.pi / 4)
        poly = truncate_sector_polygon(s, 2.0)
        # apex + 2*(cos, sin) of the edge angles 0 and pi/4
        assert poly[1].x == pytest.approx(3.0) and poly[1].y == pytest.approx(0.0)
        assert poly[2].x == pytest.approx(1 + math.sqrt(2))
        assert poly[2].y == pytest.approx(math.sqrt(2))

    def test_bad_radius(self):
        s = sector_from_pose(Point(0, 0), 0.0, 1.0)
        with pytest.raises(DegenerateInput):
            truncate_sector_polygon(s, 0.0)

    def test_vertices_in_sector_within_radius(self, rng):
        for _ in range(200):
            s = rand_sector(rng, max_angle_deg=170.0)
            radius = rng.uniform(1, 1e6)
            for p in truncate_sector_polygon(s, radius):
                assert point_in_mono_sector(p, s)
                d = math.hypot(p.x - s.apex.x, p.y - s.apex.y)
                assert d <= radius * (1 + 1e-12)

    def test_wide_angle_fan(self):
        s = sector_from_pose(Point(0, 0), math.pi / 2, 2.5)
        poly = truncate_sector_polygon(s, 10.0)
        assert len(poly) >= 4  # apex + at least 3 arc points
        # bounding box covers the axis extremes the span crosses
        assert max(p.y for p in poly) == pytest.approx(10.0)


def test_slope_line_roundtrip():
    sl = SlopeLine("y-of-x", 2.0, 3.0)
    line = sl.to_normal()
    for x in (-1.0, 0.0, 2.0):
        y = 2.0 * x + 3.0
        assert abs(x * math.cos(line.theta) + y * math.sin(line.theta) - line.rho) < 1e-9 * max(1, abs(x), abs(y))
    with pytest.raises(DegenerateInput):
        SlopeLine("sideways", 1.0, 0.0)
