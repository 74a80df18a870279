"""Comparison methods: exhaustive linear scan and a regular primal-space
R-tree over radius-truncated sector polygons."""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DegenerateInput
from .geometry import Rect
from .indexes import QueryResult, post_filter
from .rtree import RTree
from .sectors import SectorSet

TWO_PI = 2.0 * math.pi


def exhaustive_query(sectors: SectorSet, x: float, y: float, kernel=None) -> np.ndarray:
    """All sector positions whose closed mono wedge contains (x, y)."""
    kernel = kernel if kernel is not None else kernels.default()
    return kernel.scan_mono(*sectors.mono_args(), x, y)


class LinearScan:
    """Index-shaped wrapper around the exhaustive scan, for the harness."""

    def __init__(self, sectors: SectorSet):
        self.sectors = sectors

    def query_point(self, x: float, y: float, kernel=None) -> QueryResult:
        hits = exhaustive_query(self.sectors, x, y, kernel=kernel)
        # the scan inspects every sector: k = n, and the survivor list is
        # already the exact answer
        return QueryResult(hits, hits, len(self.sectors), 0)

    def query_direction(self, line, kernel=None) -> QueryResult:
        from .indexes import _directional_hits

        all_ids = np.arange(len(self.sectors), dtype=np.int64)
        hits = _directional_hits(all_ids, line, self.sectors)
        return QueryResult(hits, hits, len(self.sectors), 0)


def truncated_mbr_arrays(sectors: SectorSet, radius: float) -> np.ndarray:
    """(n, 4) bounds of the radius-truncated sector polygons.

    Equals the bounding box of ``geometry.truncate_sector_polygon``: apex,
    the two edge-ray tips, widened to apex +/- radius on each axis the
    wedge's angular span crosses.
    """
    if radius <= 0.0:
        raise DegenerateInput(f"radius must be positive, got {radius}")
    ax, ay = sectors.ax, sectors.ay
    half = 0.5 * sectors.angle
    e1 = sectors.direction - half
    e2 = sectors.direction + half
    c1x = ax + radius * np.cos(e1)
    c1y = ay + radius * np.sin(e1)
    c2x = ax + radius * np.cos(e2)
    c2y = ay + radius * np.sin(e2)
    min_x = np.minimum(ax, np.minimum(c1x, c2x))
    max_x = np.maximum(ax, np.maximum(c1x, c2x))
    min_y = np.minimum(ay, np.minimum(c1y, c2y))
    max_y = np.maximum(ay, np.maximum(c1y, c2y))
    # Triangles below pi/2 need no widening; wider fans carry arc points at
    # the axis headings their span crosses (see truncate_sector_polygon).
    ang = sectors.angle
    wide = ang > 0.5 * math.pi
    for heading, axis, sign in (
        (0.0, "x", +1), (0.5 * math.pi, "y", +1),
        (math.pi, "x", -1), (1.5 * math.pi, "y", -1),
    ):
        covered = wide & ((heading - e1) % TWO_PI < ang)
        if not covered.any():
            continue
        if axis == "x" and sign > 0:
            max_x = np.where(covered, np.maximum(max_x, ax + radius), max_x)
        elif axis == "x":
            min_x = np.where(covered, np.minimum(min_x, ax - radius), min_x)
        elif sign > 0:
            max_y = np.where(covered, np.maximum(max_y, ay + radius), max_y)
        else:
            min_y = np.where(covered, np.minimum(min_y, ay - radius), min_y)
    return np.ascontiguousarray(np.column_stack([min_x, min_y, max_x, max_y]))


class RegularIndex:
    """Primal-space R-tree over MBRs of radius-truncated sectors."""

    def __init__(self, tree: RTree, sectors: SectorSet, truncation_radius: float,
                 branching: int):
        self.tree = tree
        self.sectors = sectors
        self.truncation_radius = truncation_radius
        self.branching = branching

    @classmethod
    def build(cls, sectors: SectorSet, radius: float = 1e8, branching: int = 7,
              method: str = "bulk") -> "RegularIndex":
        bounds = truncated_mbr_arrays(sectors, radius)
        payloads = np.arange(len(sectors), dtype=np.int64)
        if method == "bulk":
            tree = RTree.bulk_load(branching=branching, bounds=bounds, payloads=payloads)
        elif method == "insert":
            tree = RTree(branching)
            for i, row in enumerate(bounds):
                tree.insert(Rect(row[0], row[1], row[2], row[3]), i)
        else:
            raise ValueError(f"unknown build method {method!r}")
        return cls(tree, sectors, radius, branching)

    def query_point(self, x: float, y: float, kernel=None) -> QueryResult:
        kernel = kernel if kernel is not None else kernels.default()
        candidates, visits = self.tree.search_point(x, y, kernel=kernel)
        hits = post_filter(candidates, x, y, self.sectors, kernel=kernel)
        return QueryResult(candidates, hits, int(candidates.size), visits)


def build_regular(sectors: SectorSet, radius: float = 1e8, branching: int = 7,
                  method: str = "bulk") -> RegularIndex:
    return RegularIndex.build(sectors, radius, branching, method)


def query_regular(index: RegularIndex, p, kernel=None) -> QueryResult:
    return index.query_point(p.x, p.y, kernel=kernel)
