"""Height-balanced 2D R-tree over rectangle keys with opaque integer payloads.

Two build paths share one query representation:

* ``insert`` grows a mutable node tree (least-enlargement descent,
  quadratic split with minimum fill ceil(B/2));
* ``bulk_load`` packs entries with sort-tile-recursive ordering at the
  leaf level and rolls consecutive groups up to the root.

Searches and statistics run on a flattened, BFS-ordered array form
(``FlatTree``) produced lazily after the build; the flat arrays are what
the query kernels consume. A bulk-loaded tree is frozen: it cannot take
further inserts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import EmptyTree, InvalidConfig
from .geometry import (
    Rect,
    rect_area_sum,
    rect_multi_covered_area,
    rect_pairwise_intersection_sum,
    rect_union_area,
)


@dataclass(frozen=True)
class TreeStats:
    variant: str  # "sum" | "union"
    mean_coverage: float
    mean_overlap: float
    node_count: int
    height: int


@dataclass
class FlatTree:
    """BFS-ordered array form: children of any node are contiguous."""

    node_bounds: np.ndarray  # (nn, 4) float64
    node_kind: np.ndarray  # (nn,) uint8, 1 = leaf
    node_first: np.ndarray  # (nn,) int64: first child node / first entry
    node_count: np.ndarray  # (nn,) int64
    ent_bounds: np.ndarray  # (ne, 4) float64
    ent_payload: np.ndarray  # (ne,) int64
    height: int

    @classmethod
    def empty(cls) -> "FlatTree":
        return cls(
            np.empty((0, 4)),
            np.empty(0, np.uint8),
            np.empty(0, np.int64),
            np.empty(0, np.int64),
            np.empty((0, 4)),
            np.empty(0, np.int64),
            0,
        )


class _Node:
    __slots__ = ("leaf", "min_x", "min_y", "max_x", "max_y", "items")

    def __init__(self, leaf: bool):
        self.leaf = leaf
        self.min_x = math.inf
        self.min_y = math.inf
        self.max_x = -math.inf
        self.max_y = -math.inf
        self.items: list = []

    def bounds_of(self, item) -> tuple[float, float, float, float]:
        if self.leaf:
            return item[0], item[1], item[2], item[3]
        return item.min_x, item.min_y, item.max_x, item.max_y

    def grow(self, bx0, by0, bx1, by1):
        if bx0 < self.min_x:
            self.min_x = bx0
        if by0 < self.min_y:
            self.min_y = by0
        if bx1 > self.max_x:
            self.max_x = bx1
        if by1 > self.max_y:
            self.max_y = by1

    def refit(self):
        self.min_x = self.min_y = math.inf
        self.max_x = self.max_y = -math.inf
        for it in self.items:
            self.grow(*self.bounds_of(it))


def _area(x0, y0, x1, y1) -> float:
    return (x1 - x0) * (y1 - y0)


def _union(a, b):
    return (min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


class RTree:
    """R-tree with a fixed branching factor (max entries/children per node)."""

    def __init__(self, branching: int = 7):
        if not isinstance(branching, int) or branching < 2:
            raise InvalidConfig(f"branching factor must be an integer >= 2, got {branching}")
        self.branching = branching
        self._root: _Node | None = None
        self._count = 0
        self._flat: FlatTree | None = None
        self._frozen = False

    def __len__(self) -> int:
        return self._count

    @property
    def height(self) -> int:
        if self._flat is not None:
            return self._flat.height
        node = self._root
        h = 0
        while node is not None:
            h += 1
            node = None if node.leaf else node.items[0]
        return h

    # -- insert path ----------------------------------------------------

    def insert(self, rect: Rect, payload: int) -> None:
        if self._frozen:
            raise InvalidConfig("bulk-loaded tree is frozen; build a new one")
        self._flat = None
        entry = (
            float(rect.min_x),
            float(rect.min_y),
            float(rect.max_x),
            float(rect.max_y),
            int(payload),
        )
        if self._root is None:
            root = _Node(leaf=True)
            root.items.append(entry)
            root.grow(*entry[:4])
            self._root = root
        else:
            sibling = self._insert(self._root, entry)
            if sibling is not None:
                old = self._root
                root = _Node(leaf=False)
                root.items = [old, sibling]
                root.refit()
                self._root = root
        self._count += 1

    def _insert(self, node: _Node, entry) -> "_Node | None":
        node.grow(*entry[:4])
        if node.leaf:
            node.items.append(entry)
        else:
            child = self._choose_child(node, entry)
            sibling = self._insert(child, entry)
            if sibling is not None:
                node.items.append(sibling)
        if len(node.items) > self.branching:
            return self._split(node)
        return None

    @staticmethod
    def _choose_child(node: _Node, entry) -> _Node:
        ex0, ey0, ex1, ey1 = entry[:4]
        best = None
        best_enlarge = math.inf
        best_area = math.inf
        for child in node.items:
            area = _area(child.min_x, child.min_y, child.max_x, child.max_y)
            grown = _area(
                min(child.min_x, ex0),
                min(child.min_y, ey0),
                max(child.max_x, ex1),
                max(child.max_y, ey1),
            )
            enlarge = grown - area
            if enlarge < best_enlarge or (enlarge == best_enlarge and area < best_area):
                best = child
                best_enlarge = enlarge
                best_area = area
        return best

    def _split(self, node: _Node) -> _Node:
        """Quadratic split; ``node`` keeps one group, the new node gets the other."""
        items = node.items
        bounds = [node.bounds_of(it) for it in items]
        n = len(items)
        min_fill = (self.branching + 1) // 2

        # seeds: pair wasting the most area when joined
        s1 = s2 = 0
        worst = -math.inf
        for i in range(n):
            for j in range(i + 1, n):
                waste = (
                    _area(*_union(bounds[i], bounds[j]))
                    - _area(*bounds[i])
                    - _area(*bounds[j])
                )
                if waste > worst:
                    worst = waste
                    s1, s2 = i, j

        g1, g2 = [s1], [s2]
        b1, b2 = bounds[s1], bounds[s2]
        rest = [k for k in range(n) if k != s1 and k != s2]
        while rest:
            if len(g1) + len(rest) == min_fill:
                g1.extend(rest)
                b1 = None  # refit below
                break
            if len(g2) + len(rest) == min_fill:
                g2.extend(rest)
                b2 = None
                break
            # entry with the strongest preference
            pick = 0
            pick_diff = -math.inf
            for pos, k in enumerate(rest):
                d1 = _area(*_union(b1, bounds[k])) - _area(*b1)
                d2 = _area(*_union(b2, bounds[k])) - _area(*b2)
                diff = abs(d1 - d2)
                if diff > pick_diff:
                    pick_diff = diff
                    pick = pos
            k = rest.pop(pick)
            d1 = _area(*_union(b1, bounds[k])) - _area(*b1)
            d2 = _area(*_union(b2, bounds[k])) - _area(*b2)
            if d1 < d2:
                to_first = True
            elif d2 < d1:
                to_first = False
            elif _area(*b1) != _area(*b2):
                to_first = _area(*b1) < _area(*b2)
            else:
                to_first = len(g1) <= len(g2)
            if to_first:
                g1.append(k)
                b1 = _union(b1, bounds[k])
            else:
                g2.append(k)
                b2 = _union(b2, bounds[k])

        sibling = _Node(leaf=node.leaf)
        sibling.items = [items[k] for k in g2]
        sibling.refit()
        node.items = [items[k] for k in g1]
        node.refit()
        return sibling

    # -- bulk path --------------------------------------------------------

    @classmethod
    def bulk_load(
        cls,
        entries: Iterable[tuple[Rect, int]] | None = None,
        branching: int = 7,
        *,
        bounds: np.ndarray | None = None,
        payloads: np.ndarray | None = None,
    ) -> "RTree":
        """Build a frozen tree from (Rect, payload) pairs or raw arrays."""
        tree = cls(branching)
        if entries is not None:
            if bounds is not None or payloads is not None:
                raise InvalidConfig("pass either entries or bounds/payloads")
            pairs = list(entries)
            bounds = np.array(
                [(r.min_x, r.min_y, r.max_x, r.max_y) for r, _ in pairs]
            ).reshape(len(pairs), 4)
            payloads = np.array([p for _, p in pairs], dtype=np.int64)
        bounds = np.ascontiguousarray(bounds, dtype=np.float64).reshape(-1, 4)
        payloads = np.ascontiguousarray(payloads, dtype=np.int64)
        if len(bounds) != len(payloads):
            raise InvalidConfig("bounds and payloads lengths differ")
        tree._count = len(bounds)
        tree._flat = _str_build(bounds, payloads, branching)
        tree._frozen = True
        return tree

    # -- query representation ----------------------------------------------

    def flat(self) -> FlatTree:
        if self._flat is None:
            self._flat = _flatten(self._root)
        return self._flat

    # -- searches -----------------------------------------------------------

    def search(self, pred: Callable[[Rect], bool]) -> list[int]:
        """Payloads of leaf entries whose Rect satisfies ``pred``.

        ``pred`` must be monotone w.r.t. containment (true on a child
        implies true on the parent MBR) for the pruning to be lossless.
        """
        ft = self.flat()
        out: list[int] = []
        queue = [0] if ft.node_bounds.shape[0] else []
        head = 0
        while head < len(queue):
            i = queue[head]
            head += 1
            b = ft.node_bounds[i]
            if not pred(Rect(b[0], b[1], b[2], b[3])):
                continue
            first = int(ft.node_first[i])
            count = int(ft.node_count[i])
            if ft.node_kind[i] == 1:
                for e in range(first, first + count):
                    eb = ft.ent_bounds[e]
                    if pred(Rect(eb[0], eb[1], eb[2], eb[3])):
                        out.append(int(ft.ent_payload[e]))
            else:
                queue.extend(range(first, first + count))
        return out

    def _kernel(self, kernel):
        return kernel if kernel is not None else kernels.default()

    def search_point(self, x: float, y: float, kernel=None):
        ft = self.flat()
        return self._kernel(kernel).point_query(
            ft.node_bounds, ft.node_kind, ft.node_first, ft.node_count,
            ft.ent_bounds, ft.ent_payload, x, y,
        )

    def search_line(self, nx: float, ny: float, rho: float, kernel=None):
        ft = self.flat()
        return self._kernel(kernel).line_query(
            ft.node_bounds, ft.node_kind, ft.node_first, ft.node_count,
            ft.ent_bounds, ft.ent_payload, nx, ny, rho,
        )

    def search_sinusoid(self, a: float, b: float, kernel=None):
        ft = self.flat()
        return self._kernel(kernel).sinusoid_query(
            ft.node_bounds, ft.node_kind, ft.node_first, ft.node_count,
            ft.ent_bounds, ft.ent_payload, a, b,
        )

    # -- statistics -----------------------------------------------------------

    def stats(self, variant: str = "union") -> TreeStats:
        """Mean per-node coverage/overlap over every node of the tree.

        A node's children are its child MBRs (internal nodes) or its entry
        rectangles (leaves). Nodes with a zero-area MBR are skipped in the
        means. ``sum`` counts child areas / pairwise intersections; ``union``
        counts area covered at least once / more than once.
        """
        if variant not in ("sum", "union"):
            raise InvalidConfig(f"unknown stats variant {variant!r}")
        ft = self.flat()
        if ft.node_bounds.shape[0] == 0:
            raise EmptyTree("stats on an empty tree")
        cov_total = 0.0
        ov_total = 0.0
        counted = 0
        for i in range(ft.node_bounds.shape[0]):
            b = ft.node_bounds[i]
            area = (b[2] - b[0]) * (b[3] - b[1])
            if area <= 0.0:
                continue
            first = int(ft.node_first[i])
            count = int(ft.node_count[i])
            source = ft.ent_bounds if ft.node_kind[i] == 1 else ft.node_bounds
            children = [
                Rect(c[0], c[1], c[2], c[3])
                for c in source[first : first + count].tolist()
            ]
            if variant == "sum":
                cov = rect_area_sum(children)
                ov = rect_pairwise_intersection_sum(children)
            else:
                cov = rect_union_area(children)
                ov = rect_multi_covered_area(children)
            cov_total += cov / area
            ov_total += ov / area
            counted += 1
        if counted == 0:
            raise EmptyTree("no node with positive area")
        return TreeStats(
            variant, cov_total / counted, ov_total / counted,
            int(ft.node_bounds.shape[0]), ft.height,
        )


def _flatten(root: _Node | None) -> FlatTree:
    if root is None:
        return FlatTree.empty()
    nodes: list[_Node] = [root]
    head = 0
    first = []
    ent_rows: list[tuple] = []
    while head < len(nodes):
        node = nodes[head]
        head += 1
        if node.leaf:
            first.append(len(ent_rows))
            ent_rows.extend(node.items)
        else:
            first.append(len(nodes))
            nodes.extend(node.items)
    nn = len(nodes)
    node_bounds = np.empty((nn, 4))
    node_kind = np.empty(nn, np.uint8)
    node_count = np.empty(nn, np.int64)
    for i, node in enumerate(nodes):
        node_bounds[i] = (node.min_x, node.min_y, node.max_x, node.max_y)
        node_kind[i] = 1 if node.leaf else 0
        node_count[i] = len(node.items)
    ent = np.array([r[:4] for r in ent_rows], dtype=np.float64).reshape(
        len(ent_rows), 4
    )
    pay = np.array([r[4] for r in ent_rows], dtype=np.int64)
    height = 1
    node = root
    while not node.leaf:
        height += 1
        node = node.items[0]
    return FlatTree(
        node_bounds, node_kind, np.array(first, dtype=np.int64), node_count,
        ent, pay, height,
    )


def _str_order(bounds: np.ndarray, branching: int) -> np.ndarray:
    """Sort-tile-recursive ordering: vertical slices by center-x, then
    center-y within each slice. Stable, so ties keep input order."""
    n = len(bounds)
    n_leaf = -(-n // branching)
    slices = math.isqrt(n_leaf)
    if slices * slices < n_leaf:
        slices += 1
    slice_size = -(-n // slices)
    cx = 0.5 * (bounds[:, 0] + bounds[:, 2])
    cy = 0.5 * (bounds[:, 1] + bounds[:, 3])
    pos = np.empty(n, np.int64)
    pos[np.argsort(cx, kind="stable")] = np.arange(n)
    return np.lexsort((cy, pos // slice_size))


def _str_build(bounds: np.ndarray, payloads: np.ndarray, branching: int) -> FlatTree:
    n = len(bounds)
    if n == 0:
        return FlatTree.empty()
    perm = _str_order(bounds, branching)
    eb = np.ascontiguousarray(bounds[perm])
    ep = np.ascontiguousarray(payloads[perm])

    def pack(child_bounds: np.ndarray):
        m = len(child_bounds)
        starts = np.arange(0, m, branching, dtype=np.int64)
        counts = np.minimum(starts + branching, m) - starts
        packed = np.hstack(
            [
                np.minimum.reduceat(child_bounds[:, :2], starts, axis=0),
                np.maximum.reduceat(child_bounds[:, 2:], starts, axis=0),
            ]
        )
        return packed, starts, counts

    lvl_bounds, lvl_first, lvl_count = pack(eb)
    levels = [(lvl_bounds, lvl_first, lvl_count, True)]
    while len(levels[-1][0]) > 1:
        nb, nf, nc = pack(levels[-1][0])
        levels.append((nb, nf, nc, False))
    levels.reverse()  # root level first

    sizes = [len(lv[0]) for lv in levels]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    nn = int(offsets[-1])
    node_bounds = np.ascontiguousarray(np.vstack([lv[0] for lv in levels]))
    node_kind = np.zeros(nn, np.uint8)
    node_first = np.empty(nn, np.int64)
    node_count = np.empty(nn, np.int64)
    for li, (lvb, fst, cnt, is_leaf) in enumerate(levels):
        sl = slice(int(offsets[li]), int(offsets[li + 1]))
        node_count[sl] = cnt
        if is_leaf:
            node_kind[sl] = 1
            node_first[sl] = fst
        else:
            node_first[sl] = fst + offsets[li + 1]
    return FlatTree(
        node_bounds, node_kind, node_first, node_count, eb, ep, len(levels)
    )
