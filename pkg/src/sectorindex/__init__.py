"""Spatial indexing for infinitely long angular sectors.

Angular sectors (unbounded wedges) are mapped to finite dual coordinates
— slope/intercept points in two affine spaces, or (theta, rho) points in
polar space — and indexed in an R-tree over those coordinates. Point
queries dualize the query point into a line or sinusoid and collect every
leaf rectangle it meets; an exact mono-wedge post-filter turns the
candidate list into the exact answer. Exhaustive scan and a regular
R-tree over truncated sector polygons serve as baselines, and a benchmark
harness reproduces the evaluation metrics (build/search time, candidate
list length, tree coverage/overlap).
"""

from .baselines import LinearScan, RegularIndex, build_regular, exhaustive_query
from .errors import (
    DegenerateInput,
    EmptyTree,
    InvalidConfig,
    InvalidRect,
    ParseError,
    RangeError,
)
from .geometry import (
    AngularSector,
    NormalLine,
    Point,
    Rect,
    SlopeLine,
    line_from_two_points,
    point_in_bi_sector,
    point_in_mono_sector,
    sector_from_pose,
    truncate_sector_polygon,
)
from .duals import (
    DualPoint,
    DualSectorFootprint,
    Sinusoid,
    affine_dual_line,
    affine_dual_point,
    affine_sector_choice,
    polar_dual_line,
    polar_dual_point,
    polar_sector_footprint,
    sinusoid_rect_intersects,
)
from .indexes import (
    AffineDualIndex,
    PolarDualIndex,
    QueryResult,
    build_affine,
    build_polar,
    post_filter,
)
from .rtree import RTree, TreeStats
from .sectors import SectorSet, load_sectors, save_sectors

__version__ = "0.1.0"
