"""Synthetic data generation, experiment runner and metric collection.

Angle values default to an exponential distribution with mean 0.952
degrees truncated at 10 degrees, which puts 65% of angles below one
degree; apex positions and bisector directions are uniform. Benchmarks
time index construction and batches of random point queries (median of
several repetitions, after a warm-up pass) and collect candidate/hit list
lengths plus per-tree coverage and overlap in both sum and union flavors.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .baselines import LinearScan, RegularIndex
from .errors import EmptyTree, InvalidConfig, ParseError, RangeError
from .geometry import Rect
from .indexes import AffineDualIndex, PolarDualIndex
from .rtree import RTree
from .sectors import SectorSet, load_sectors, save_sectors

METHODS = ("linear", "regular", "dual-polar", "dual-affine")

DEFAULT_REGION = Rect(0.0, 0.0, 10_000.0, 10_000.0)
DEFAULT_BRANCHING = 7
DEFAULT_TRUNCATION = 1e8
QUERY_REGION_SIDE = 5_000.0  # 5x5 km around the mean apex position

DEG = math.pi / 180.0


# -- angle distributions --------------------------------------------------


@dataclass(frozen=True)
class TruncatedExponential:
    """Exponential(mean_deg) conditioned on values below max_deg."""

    mean_deg: float = 0.952
    max_deg: float = 10.0

    def __post_init__(self):
        if self.mean_deg <= 0.0:
            raise InvalidConfig(f"mean_deg must be positive, got {self.mean_deg}")
        if not 0.0 < self.max_deg <= 180.0:
            raise InvalidConfig(f"max_deg must be in (0, 180], got {self.max_deg}")

    def sample_deg(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random(n)
        scale = -math.expm1(-self.max_deg / self.mean_deg)
        x = -self.mean_deg * np.log1p(-u * scale)
        return np.maximum(x, 1e-12)


@dataclass(frozen=True)
class FixedAngle:
    deg: float

    def __post_init__(self):
        if not 0.0 < self.deg < 180.0:
            raise InvalidConfig(f"fixed angle must be in (0, 180), got {self.deg}")

    def sample_deg(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.deg)


@dataclass(frozen=True)
class AngleTable:
    """Discrete distribution over angle values, e.g. a measured histogram."""

    values_deg: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.values_deg) != len(self.weights) or not self.values_deg:
            raise InvalidConfig("table needs matching, non-empty values and weights")
        if any(not 0.0 < v < 180.0 for v in self.values_deg):
            raise InvalidConfig("table angle values must be in (0, 180)")
        if any(w < 0.0 for w in self.weights) or sum(self.weights) <= 0.0:
            raise InvalidConfig("table weights must be non-negative, not all zero")

    @classmethod
    def from_csv(cls, path) -> "AngleTable":
        values, weights = [], []
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["angle_deg", "weight"]:
                raise ParseError(1, "expected header angle_deg,weight")
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise ParseError(line_no, f"expected 2 fields, got {len(row)}")
                try:
                    values.append(float(row[0]))
                    weights.append(float(row[1]))
                except ValueError:
                    raise ParseError(line_no, f"bad numeric field in {row!r}") from None
                if not (math.isfinite(values[-1]) and math.isfinite(weights[-1])):
                    raise RangeError(line_no, "non-finite table entry")
        return cls(tuple(values), tuple(weights))

    def sample_deg(self, rng: np.random.Generator, n: int) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        return rng.choice(np.asarray(self.values_deg), size=n, p=w / w.sum())


AngleDist = TruncatedExponential | FixedAngle | AngleTable


@dataclass(frozen=True)
class GenConfig:
    n: int
    region: Rect = DEFAULT_REGION
    angle_dist: AngleDist = field(default_factory=TruncatedExponential)
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidConfig(f"n must be >= 0, got {self.n}")


def generate(cfg: GenConfig) -> SectorSet:
    """n sectors: apices uniform in the region, directions uniform in
    [0, 360), angles from the configured distribution. Deterministic in
    the seed (draw order: apex x, apex y, direction, angles)."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    ax = rng.uniform(cfg.region.min_x, cfg.region.max_x, n)
    ay = rng.uniform(cfg.region.min_y, cfg.region.max_y, n)
    direction = rng.uniform(0.0, 360.0, n) * DEG
    angle = cfg.angle_dist.sample_deg(rng, n) * DEG
    return SectorSet(np.arange(n, dtype=np.int64), ax, ay, direction, angle)


def default_query_region(sectors: SectorSet) -> Rect:
    """5x5 km box centered on the mean apex (on the origin if empty)."""
    if len(sectors):
        cx = float(np.mean(sectors.ax))
        cy = float(np.mean(sectors.ay))
    else:
        cx = cy = 0.0
    h = 0.5 * QUERY_REGION_SIDE
    return Rect(cx - h, cy - h, cx + h, cy + h)


# -- reports ----------------------------------------------------------------


REPORT_COLUMNS = (
    "method",
    "backend",
    "n",
    "branching",
    "truncation_radius",
    "query_count",
    "repeats",
    "seed",
    "build_time_ms",
    "avg_search_time_ms",
    "avg_candidates",
    "avg_hits",
    "coverage_sum",
    "coverage_union",
    "overlap_sum",
    "overlap_union",
    "node_count",
    "height",
)


@dataclass
class MethodReport:
    method: str
    backend: str
    n: int
    branching: int
    truncation_radius: float
    query_count: int
    repeats: int
    seed: int
    build_time_ms: float
    avg_search_time_ms: float
    avg_candidates: float
    avg_hits: float
    coverage_sum: float | None
    coverage_union: float | None
    overlap_sum: float | None
    overlap_union: float | None
    node_count: int | None
    height: int | None

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in REPORT_COLUMNS}


def write_report_csv(reports: Sequence[MethodReport], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(REPORT_COLUMNS)
    for rep in reports:
        row = []
        for c in REPORT_COLUMNS:
            v = getattr(rep, c)
            row.append("NA" if v is None else v)
        writer.writerow(row)


def write_report_json(reports: Sequence[MethodReport], fh) -> None:
    json.dump([r.as_dict() for r in reports], fh, indent=2)
    fh.write("\n")


# -- benchmark runner --------------------------------------------------------


def _combined_stats(trees: Sequence[RTree]):
    """Coverage/overlap over one or two trees, weighted by node count."""
    rows = []
    for tree in trees:
        if len(tree) == 0:
            continue
        try:
            s_sum = tree.stats("sum")
            s_union = tree.stats("union")
        except EmptyTree:
            continue
        rows.append((s_sum, s_union, tree))
    if not rows:
        return None
    total_nodes = sum(s.node_count for s, _, _ in rows)
    cov_s = sum(s.mean_coverage * s.node_count for s, _, _ in rows) / total_nodes
    ov_s = sum(s.mean_overlap * s.node_count for s, _, _ in rows) / total_nodes
    cov_u = sum(u.mean_coverage * u.node_count for _, u, _ in rows) / total_nodes
    ov_u = sum(u.mean_overlap * u.node_count for _, u, _ in rows) / total_nodes
    return {
        "coverage_sum": cov_s,
        "coverage_union": cov_u,
        "overlap_sum": ov_s,
        "overlap_union": ov_u,
        "node_count": total_nodes,
        "height": max(t.height for _, _, t in rows),
    }


def _make_method(name: str, sectors: SectorSet, branching: int, radius: float,
                 build_method: str):
    """Returns (build() -> (query_fn, trees)) for a method name."""
    if name == "linear":
        def build():
            idx = LinearScan(sectors)
            return idx.query_point, []
    elif name == "regular":
        def build():
            idx = RegularIndex.build(sectors, radius, branching, build_method)
            return idx.query_point, [idx.tree]
    elif name == "dual-polar":
        def build():
            idx = PolarDualIndex.build(sectors, branching, build_method)
            return idx.query_point, [idx.tree]
    elif name == "dual-affine":
        def build():
            idx = AffineDualIndex.build(sectors, branching, build_method)
            return idx.query_point, [idx.tree_h, idx.tree_v]
    else:
        raise InvalidConfig(f"unknown method {name!r}; choose from {METHODS}")
    return build


def run_bench(
    sectors: SectorSet,
    methods: Sequence[str] = METHODS,
    queries: int = 100,
    query_region: Rect | None = None,
    *,
    branching: int = DEFAULT_BRANCHING,
    truncation_radius: float = DEFAULT_TRUNCATION,
    seed: int = 0,
    repeats: int = 5,
    build_method: str = "bulk",
    backend: str = "auto",
    collect_stats: bool = True,
) -> list[MethodReport]:
    """Build every requested method over the same sectors and time a batch
    of random point queries against each.

    The same query points are used for all methods; search time is the
    median over ``repeats`` timed batches after one untimed warm-up pass.
    """
    if queries < 1:
        raise InvalidConfig(f"queries must be >= 1, got {queries}")
    kernel = kernels.get(backend)
    if query_region is None:
        query_region = default_query_region(sectors)
    rng = np.random.default_rng(seed)
    qx = rng.uniform(query_region.min_x, query_region.max_x, queries)
    qy = rng.uniform(query_region.min_y, query_region.max_y, queries)

    reports = []
    for name in methods:
        build = _make_method(name, sectors, branching, truncation_radius,
                             build_method)
        t0 = time.perf_counter()
        query, trees = build()
        build_ms = (time.perf_counter() - t0) * 1e3

        cand_total = 0
        hit_total = 0
        for i in range(queries):  # warm-up, also collects counters
            res = query(qx[i], qy[i], kernel=kernel)
            cand_total += res.candidate_count
            hit_total += len(res.hits)

        rep_times = []
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            for i in range(queries):
                query(qx[i], qy[i], kernel=kernel)
            rep_times.append(time.perf_counter() - t0)
        search_ms = statistics.median(rep_times) / queries * 1e3

        tree_stats = _combined_stats(trees) if (trees and collect_stats) else None
        reports.append(
            MethodReport(
                method=name,
                backend=kernel.BACKEND,
                n=len(sectors),
                branching=branching,
                truncation_radius=truncation_radius,
                query_count=queries,
                repeats=repeats,
                seed=seed,
                build_time_ms=build_ms,
                avg_search_time_ms=search_ms,
                avg_candidates=cand_total / queries,
                avg_hits=hit_total / queries,
                coverage_sum=tree_stats["coverage_sum"] if tree_stats else None,
                coverage_union=tree_stats["coverage_union"] if tree_stats else None,
                overlap_sum=tree_stats["overlap_sum"] if tree_stats else None,
                overlap_union=tree_stats["overlap_union"] if tree_stats else None,
                node_count=tree_stats["node_count"] if tree_stats else None,
                height=tree_stats["height"] if tree_stats else None,
            )
        )
    return reports


def sweep(
    axis: str,
    values: Sequence[float],
    base: GenConfig,
    methods: Sequence[str] = METHODS,
    **bench_kwargs,
) -> list[MethodReport]:
    """One run_bench per value along ``n`` or ``radius``.

    The radius sweep regenerates nothing: the same sectors are re-indexed
    with each truncation radius. Dual indexes and the linear scan ignore
    the radius by construction, so only the regular method's rows change.
    """
    if axis not in ("n", "radius"):
        raise InvalidConfig(f"sweep axis must be 'n' or 'radius', got {axis!r}")
    if not values:
        raise InvalidConfig("sweep needs at least one value")
    if list(values) != sorted(values):
        raise InvalidConfig("sweep values must be ascending")
    rows: list[MethodReport] = []
    if axis == "n":
        for v in values:
            sectors = generate(replace(base, n=int(v)))
            rows.extend(run_bench(sectors, methods, **bench_kwargs))
    else:
        bench_kwargs = dict(bench_kwargs)
        bench_kwargs.pop("truncation_radius", None)
        sectors = generate(base)
        for v in values:
            rows.extend(
                run_bench(sectors, methods, truncation_radius=float(v), **bench_kwargs)
            )
    return rows
