"""Dual R-tree indexes over angular sectors.

The polar index stores one rectangle per sector (two when the sector
straddles the vertical direction) in (theta, rho) space; a point query
turns the point into its dual sinusoid and collects every leaf rectangle
the sinusoid meets. The affine index keeps two trees over the two
slope/intercept spaces, each sector going to the space where its dual
segment is shorter; a point query runs one dual line through each tree.

Both produce bi-sector-level candidate lists; the exact mono-wedge
post-filter turns candidates into hits and also removes any rectangle
false positives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInput
from .geometry import EPS_SCALE, HALF_PI, NormalLine, Point, Rect
from .rtree import RTree
from .sectors import SectorSet

TWO_PI = 2.0 * math.pi
PAD_SCALE = 1e-12  # matches duals.PAD_SCALE


@dataclass(frozen=True)
class QueryResult:
    """Raw tree survivors plus the exact, post-filtered answer."""

    candidates: np.ndarray  # payload ids in traversal order, duplicates possible
    hits: np.ndarray  # sorted unique sector ids containing the query
    candidate_count: int
    node_visits: int


def post_filter(candidates: np.ndarray, x: float, y: float,
                sectors: SectorSet, kernel=None) -> np.ndarray:
    """Candidates whose closed mono wedge contains (x, y); sorted, unique."""
    kernel = kernel if kernel is not None else kernels.default()
    kept = kernel.filter_mono(*sectors.mono_args(), candidates, x, y)
    return np.unique(kept)


def polar_footprint_arrays(sectors: SectorSet):
    """Vectorized dual footprints: (bounds (m,4), payloads (m,), wrapped mask).

    Wrapped sectors contribute two rows; ``payloads`` maps rows back to
    sector positions.
    """
    n = len(sectors)
    if n == 0:
        return np.empty((0, 4)), np.empty(0, np.int64), np.zeros(0, bool)
    ax, ay = sectors.ax, sectors.ay
    half = 0.5 * sectors.angle
    t1 = (sectors.direction - half + HALF_PI) % math.pi
    t1 = np.where(t1 >= math.pi, t1 - math.pi, t1)  # fp rounding at the seam
    t2 = t1 + sectors.angle
    wrapped = t2 > math.pi

    amp = np.hypot(ax, ay)
    alpha = np.arctan2(ay, ax)
    theta_c = alpha % math.pi
    extremum = np.where(np.cos(theta_c - alpha) > 0.0, amp, -amp)

    def piece(lo, hi, ax_, ay_, theta_c_, extremum_):
        v1 = ax_ * np.cos(lo) + ay_ * np.sin(lo)
        v2 = ax_ * np.cos(hi) + ay_ * np.sin(hi)
        r_lo = np.minimum(v1, v2)
        r_hi = np.maximum(v1, v2)
        inside = (lo < theta_c_) & (theta_c_ < hi)
        r_lo = np.where(inside, np.minimum(r_lo, extremum_), r_lo)
        r_hi = np.where(inside, np.maximum(r_hi, extremum_), r_hi)
        flat = r_hi == r_lo
        if flat.any():
            pad = PAD_SCALE * np.maximum(1.0, np.abs(r_lo))
            r_lo = np.where(flat, r_lo - pad, r_lo)
            r_hi = np.where(flat, r_hi + pad, r_hi)
        return np.column_stack([lo, r_lo, hi, r_hi])

    hi1 = np.where(wrapped, math.pi, t2)
    rect1 = piece(t1, hi1, ax, ay, theta_c, extremum)
    rows = [rect1]
    payloads = [np.arange(n, dtype=np.int64)]
    widx = np.nonzero(wrapped)[0]
    if widx.size:
        rect2 = piece(
            np.zeros(widx.size), t2[widx] - math.pi,
            ax[widx], ay[widx], theta_c[widx], extremum[widx],
        )
        rows.append(rect2)
        payloads.append(widx.astype(np.int64))
    return (
        np.ascontiguousarray(np.vstack(rows)),
        np.concatenate(payloads),
        wrapped,
    )


class PolarDualIndex:
    """R-tree over the polar dual footprints of the sectors."""

    def __init__(self, tree: RTree, sectors: SectorSet, branching: int):
        self.tree = tree
        self.sectors = sectors
        self.branching = branching

    @classmethod
    def build(cls, sectors: SectorSet, branching: int = 7,
              method: str = "bulk") -> "PolarDualIndex":
        bounds, payloads, _ = polar_footprint_arrays(sectors)
        if method == "bulk":
            tree = RTree.bulk_load(branching=branching, bounds=bounds, payloads=payloads)
        elif method == "insert":
            tree = RTree(branching)
            for row, pay in zip(bounds, payloads):
                tree.insert(Rect(row[0], row[1], row[2], row[3]), int(pay))
        else:
            raise ValueError(f"unknown build method {method!r}")
        return cls(tree, sectors, branching)

    def query_point(self, x: float, y: float, kernel=None) -> QueryResult:
        kernel = kernel if kernel is not None else kernels.default()
        candidates, visits = self.tree.search_sinusoid(x, y, kernel=kernel)
        hits = post_filter(candidates, x, y, self.sectors, kernel=kernel)
        return QueryResult(candidates, hits, int(candidates.size), visits)

    def query_direction(self, line: NormalLine, kernel=None) -> QueryResult:
        kernel = kernel if kernel is not None else kernels.default()
        candidates, visits = self.tree.search_point(line.theta, line.rho, kernel=kernel)
        hits = _directional_hits(candidates, line, self.sectors)
        return QueryResult(candidates, hits, int(candidates.size), visits)


class AffineDualIndex:
    """Two R-trees over the two affine dual spaces; each sector lives in
    exactly one of them (the one with the shorter dual segment)."""

    def __init__(self, tree_h: RTree, tree_v: RTree, sectors: SectorSet,
                 branching: int):
        self.tree_h = tree_h
        self.tree_v = tree_v
        self.sectors = sectors
        self.branching = branching

    @classmethod
    def build(cls, sectors: SectorSet, branching: int = 7,
              method: str = "bulk") -> "AffineDualIndex":
        bounds, choose_h = affine_segment_arrays(sectors)
        hsel = np.nonzero(choose_h)[0]
        vsel = np.nonzero(~choose_h)[0]
        if method == "bulk":
            tree_h = RTree.bulk_load(
                branching=branching, bounds=bounds[hsel], payloads=hsel
            )
            tree_v = RTree.bulk_load(
                branching=branching, bounds=bounds[vsel], payloads=vsel
            )
        elif method == "insert":
            tree_h = RTree(branching)
            tree_v = RTree(branching)
            for i, row in enumerate(bounds):
                tree = tree_h if choose_h[i] else tree_v
                tree.insert(Rect(row[0], row[1], row[2], row[3]), i)
        else:
            raise ValueError(f"unknown build method {method!r}")
        return cls(tree_h, tree_v, sectors, branching)

    def query_point(self, x: float, y: float, kernel=None) -> QueryResult:
        kernel = kernel if kernel is not None else kernels.default()
        # Dual lines of the query point over the (slope, -intercept) planes:
        # H: v = x*u - y.  V: v = y*u - x, since a line u = m*v + n through
        # (x, y) satisfies -n = y*m - x.
        lh = NormalLine.from_coefficients(x, -1.0, y)
        lv = NormalLine.from_coefficients(y, -1.0, x)
        cand_h, visits_h = self.tree_h.search_line(
            math.cos(lh.theta), math.sin(lh.theta), lh.rho, kernel=kernel
        )
        cand_v, visits_v = self.tree_v.search_line(
            math.cos(lv.theta), math.sin(lv.theta), lv.rho, kernel=kernel
        )
        candidates = np.concatenate([cand_h, cand_v])
        hits = post_filter(candidates, x, y, self.sectors, kernel=kernel)
        return QueryResult(candidates, hits, int(candidates.size),
                           visits_h + visits_v)

    def query_direction(self, line: NormalLine, kernel=None) -> QueryResult:
        from .duals import affine_dual_line, to_slope_h, to_slope_v

        kernel = kernel if kernel is not None else kernels.default()
        chunks = []
        visits = 0
        sh = to_slope_h(line)
        if sh is not None:
            d = affine_dual_line(sh)
            c, v = self.tree_h.search_point(d.u, d.v, kernel=kernel)
            chunks.append(c)
            visits += v
        sv = to_slope_v(line)
        if sv is not None:
            d = affine_dual_line(sv)
            c, v = self.tree_v.search_point(d.u, d.v, kernel=kernel)
            chunks.append(c)
            visits += v
        candidates = (
            np.concatenate(chunks) if chunks else np.empty(0, np.int64)
        )
        hits = _directional_hits(candidates, line, self.sectors)
        return QueryResult(candidates, hits, int(candidates.size), visits)


def affine_segment_arrays(sectors: SectorSet):
    """Vectorized affine choice: (segment MBRs (n,4), choose-H mask)."""
    n = len(sectors)
    if n == 0:
        return np.empty((0, 4)), np.zeros(0, bool)
    half = 0.5 * sectors.angle
    rects = []
    dists = []
    points = []
    for e in (sectors.direction - half, sectors.direction + half):
        t = (e + HALF_PI) % math.pi
        t = np.where(t >= math.pi, t - math.pi, t)
        ct = np.cos(t)
        st = np.sin(t)
        rho = sectors.ax * ct + sectors.ay * st
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            uh = np.where(st != 0.0, -ct / st, np.inf)
            vh = np.where(st != 0.0, -rho / st, np.inf)
            uv = np.where(ct != 0.0, -st / ct, np.inf)
            vv = np.where(ct != 0.0, -rho / ct, np.inf)
        points.append((uh, vh, uv, vv))
    (uh1, vh1, uv1, vv1), (uh2, vh2, uv2, vv2) = points
    with np.errstate(invalid="ignore", over="ignore"):
        dist_h = (uh1 - uh2) ** 2 + (vh1 - vh2) ** 2
        dist_v = (uv1 - uv2) ** 2 + (vv1 - vv2) ** 2
    dist_h = np.nan_to_num(dist_h, nan=np.inf, posinf=np.inf)
    dist_v = np.nan_to_num(dist_v, nan=np.inf, posinf=np.inf)
    choose_h = dist_h <= dist_v
    u1 = np.where(choose_h, uh1, uv1)
    v1 = np.where(choose_h, vh1, vv1)
    u2 = np.where(choose_h, uh2, uv2)
    v2 = np.where(choose_h, vh2, vv2)
    bounds = np.column_stack(
        [
            np.minimum(u1, u2),
            np.minimum(v1, v2),
            np.maximum(u1, u2),
            np.maximum(v1, v2),
        ]
    )
    if not np.isfinite(bounds).all():
        bad = int(np.argmax(~np.isfinite(bounds).all(axis=1)))
        raise DegenerateInput(
            f"sector {bad}: no finite affine dual segment (slope overflow)"
        )
    return np.ascontiguousarray(bounds), choose_h


def _directional_hits(candidates: np.ndarray, line: NormalLine,
                      sectors: SectorSet) -> np.ndarray:
    """A line matches a sector when it passes through the apex and its
    slope angle falls inside the sector's closed slope interval."""
    if candidates.size == 0:
        return np.empty(0, np.int64)
    ids = np.unique(candidates)
    ax = sectors.ax[ids]
    ay = sectors.ay[ids]
    res = np.abs(ax * math.cos(line.theta) + ay * math.sin(line.theta) - line.rho)
    eps = EPS_SCALE * np.maximum(
        np.maximum(np.abs(ax), np.abs(ay)), max(1.0, abs(line.rho))
    )
    on_apex = res <= eps
    phi = line.slope_angle()
    e1 = sectors.direction[ids] - 0.5 * sectors.angle[ids]
    rel = (phi - e1) % math.pi
    eps_a = 1e-9
    in_span = (rel <= sectors.angle[ids] + eps_a) | (rel >= math.pi - eps_a)
    return ids[on_apex & in_span]


# spec-facing functional aliases ------------------------------------------------

def build_polar(sectors: SectorSet, branching: int = 7,
                method: str = "bulk") -> PolarDualIndex:
    return PolarDualIndex.build(sectors, branching, method)


def build_affine(sectors: SectorSet, branching: int = 7,
                 method: str = "bulk") -> AffineDualIndex:
    return AffineDualIndex.build(sectors, branching, method)


def query_point_polar(index: PolarDualIndex, p: Point, kernel=None) -> QueryResult:
    return index.query_point(p.x, p.y, kernel=kernel)


def query_point_affine(index: AffineDualIndex, p: Point, kernel=None) -> QueryResult:
    return index.query_point(p.x, p.y, kernel=kernel)


def query_direction(index, line: NormalLine, kernel=None) -> QueryResult:
    return index.query_direction(line, kernel=kernel)
