import math

import numpy as np
import pytest

from sectorindex.errors import EmptyTree, InvalidConfig
from sectorindex.geometry import (
    NormalLine,
    Rect,
    line_intersects_rect,
    rect_area_sum,
    rect_multi_covered_area,
    rect_pairwise_intersection_sum,
    rect_union_area,
)
from sectorindex.rtree import RTree


def rand_rect(rng, span=100.0):
    x = np.sort(rng.uniform(0, span, 2))
    y = np.sort(rng.uniform(0, span, 2))
    return Rect(x[0], y[0], x[1], y[1])


def build_random(rng, n, branching=7):
    """Insert-built or bulk-built at random; returns (tree, entries)."""
    entries = [(rand_rect(rng), i) for i in range(n)]
    if rng.random() < 0.5:
        tree = RTree(branching)
        for r, p in entries:
            tree.insert(r, p)
    else:
        tree = RTree.bulk_load(entries, branching)
    return tree, entries


def check_invariants(tree: RTree, enforce_min_fill=True):
    # min fill is a property of the quadratic split; packed bulk loading
    # leaves one trailing underfull node per level
    ft = tree.flat()
    nn = ft.node_bounds.shape[0]
    if nn == 0:
        return
    min_fill = (tree.branching + 1) // 2
    depths = {}
    queue = [(0, 0)]
    while queue:
        i, depth = queue.pop()
        first = int(ft.node_first[i])
        count = int(ft.node_count[i])
        assert 1 <= count <= tree.branching
        if i != 0 and enforce_min_fill:
            assert count >= min_fill
        b = ft.node_bounds[i]
        if ft.node_kind[i] == 1:
            depths[depth] = True
            child = ft.ent_bounds[first : first + count]
        else:
            child = ft.node_bounds[first : first + count]
            queue.extend((c, depth + 1) for c in range(first, first + count))
        # node MBR is exactly the bound of its children
        assert b[0] == child[:, 0].min() and b[1] == child[:, 1].min()
        assert b[2] == child[:, 2].max() and b[3] == child[:, 3].max()
    assert len(depths) == 1  # all leaves at equal depth


class TestConstruction:
    def test_new_empty(self):
        tree = RTree(7)
        assert len(tree) == 0 and tree.height == 0

    def test_minimal_branching(self):
        assert RTree(2).branching == 2

    def test_invalid_branching(self):
        with pytest.raises(InvalidConfig):
            RTree(1)

    def test_single_insert(self):
        tree = RTree(7)
        tree.insert(Rect(0, 0, 1, 1), 42)
        assert len(tree) == 1 and tree.height == 1

    def test_overflow_splits(self):
        tree = RTree(7)
        for i in range(8):
            tree.insert(Rect(i, 0, i + 1, 1), i)
        assert tree.height == 2
        check_invariants(tree)

    def test_insert_invariants(self, rng):
        tree = RTree(4)
        for i in range(300):
            tree.insert(rand_rect(rng), i)
            if i % 60 == 0:
                check_invariants(tree)
        check_invariants(tree)

    def test_frozen_after_bulk(self):
        tree = RTree.bulk_load([(Rect(0, 0, 1, 1), 0)])
        with pytest.raises(InvalidConfig):
            tree.insert(Rect(0, 0, 1, 1), 1)


class TestBulkLoad:
    def test_empty(self):
        tree = RTree.bulk_load([])
        assert len(tree) == 0 and tree.height == 0
        assert tree.search(lambda r: True) == []

    def test_single(self):
        tree = RTree.bulk_load([(Rect(0, 0, 1, 1), 5)])
        assert tree.height == 1
        assert tree.search(lambda r: True) == [5]

    def test_height_bound(self, rng):
        for n in (10, 100, 1000, 5000):
            entries = [(rand_rect(rng), i) for i in range(n)]
            tree = RTree.bulk_load(entries, 7)
            assert tree.height <= math.ceil(math.log(n, 7)) + 1
            check_invariants(tree, enforce_min_fill=False)

    def test_matches_insert_semantics(self, rng):
        entries = [(rand_rect(rng), i) for i in range(400)]
        bulk = RTree.bulk_load(entries, 5)
        ins = RTree(5)
        for r, p in entries:
            ins.insert(r, p)
        for _ in range(50):
            probe = rand_rect(rng)
            pred = lambda r: r.intersection_area(probe) > 0 or (
                r.min_x <= probe.max_x
                and probe.min_x <= r.max_x
                and r.min_y <= probe.max_y
                and probe.min_y <= r.max_y
            )
            assert sorted(bulk.search(pred)) == sorted(ins.search(pred))


class TestSearch:
    def test_false_pred(self, rng):
        tree, _ = build_random(rng, 100)
        assert tree.search(lambda r: False) == []

    def test_true_pred(self, rng):
        tree, entries = build_random(rng, 137)
        assert sorted(tree.search(lambda r: True)) == list(range(137))

    def test_line_pred_vs_brute(self, rng):
        tree, entries = build_random(rng, 250)
        for _ in range(20):
            line = NormalLine(rng.uniform(0, math.pi), rng.uniform(0, 120))
            got = sorted(tree.search(lambda r: line_intersects_rect(line, r)))
            want = sorted(p for r, p in entries if line_intersects_rect(line, r))
            assert got == want

    def test_point_search_vs_brute(self, rng):
        tree, entries = build_random(rng, 500)
        for _ in range(50):
            x, y = rng.uniform(0, 100, 2)
            got, visits = tree.search_point(x, y)
            eps = 1e-9 * max(1.0, x, y)
            want = sorted(
                p for r, p in entries if r.contains_point(x, y, eps)
            )
            assert sorted(got.tolist()) == want
            assert visits >= 1

    def test_insert_then_search_visible(self, rng):
        tree = RTree(7)
        entries = []
        for i in range(10_000):
            r = rand_rect(rng, span=1000.0)
            entries.append((r, i))
            tree.insert(r, i)
        x, y = 500.0, 500.0
        got, _ = tree.search_point(x, y)
        eps = 1e-9 * max(1.0, x, y)
        want = sorted(p for r, p in entries if r.contains_point(x, y, eps))
        assert sorted(got.tolist()) == want


class TestStats:
    def test_single_entry_fills_node(self):
        tree = RTree(7)
        tree.insert(Rect(0, 0, 2, 3), 0)
        for variant in ("sum", "union"):
            s = tree.stats(variant)
            assert s.mean_coverage == pytest.approx(1.0)
            assert s.mean_overlap == pytest.approx(0.0)
            assert s.node_count == 1 and s.height == 1

    def test_two_identical_children(self):
        tree = RTree(7)
        tree.insert(Rect(0, 0, 1, 1), 0)
        tree.insert(Rect(0, 0, 1, 1), 1)
        su = tree.stats("union")
        assert su.mean_coverage == pytest.approx(1.0)
        assert su.mean_overlap == pytest.approx(1.0)
        ss = tree.stats("sum")
        assert ss.mean_coverage == pytest.approx(2.0)
        assert ss.mean_overlap == pytest.approx(1.0)

    def test_disjoint_tiling(self):
        tree = RTree(7)
        tree.insert(Rect(0, 0, 1, 1), 0)
        tree.insert(Rect(1, 0, 2, 1), 1)
        for variant in ("sum", "union"):
            s = tree.stats(variant)
            assert s.mean_coverage == pytest.approx(1.0)
            assert s.mean_overlap == pytest.approx(0.0)

    def test_empty_tree(self):
        with pytest.raises(EmptyTree):
            RTree(7).stats("union")

    def test_bad_variant(self, rng):
        tree, _ = build_random(rng, 10)
        with pytest.raises(InvalidConfig):
            tree.stats("median")

    def test_against_geometry_brute(self, rng):
        tree, _ = build_random(rng, 300)
        ft = tree.flat()
        for variant in ("sum", "union"):
            cov = ov = 0.0
            cnt = 0
            for i in range(ft.node_bounds.shape[0]):
                b = ft.node_bounds[i]
                area = (b[2] - b[0]) * (b[3] - b[1])
                if area <= 0:
                    continue
                first, count = int(ft.node_first[i]), int(ft.node_count[i])
                src = ft.ent_bounds if ft.node_kind[i] == 1 else ft.node_bounds
                children = [Rect(*c) for c in src[first : first + count].tolist()]
                if variant == "sum":
                    cov += rect_area_sum(children) / area
                    ov += rect_pairwise_intersection_sum(children) / area
                else:
                    cov += rect_union_area(children) / area
                    ov += rect_multi_covered_area(children) / area
                cnt += 1
            s = tree.stats(variant)
            assert s.mean_coverage == pytest.approx(cov / cnt)
            assert s.mean_overlap == pytest.approx(ov / cnt)

    def test_variant_relations(self, rng):
        for _ in range(10):
            tree, _ = build_random(rng, int(rng.integers(5, 200)))
            su = tree.stats("union")
            ss = tree.stats("sum")
            assert 0.0 <= su.mean_coverage <= 1.0
            assert 0.0 <= su.mean_overlap <= 1.0
            assert ss.mean_coverage >= su.mean_coverage - 1e-12
            assert ss.mean_overlap >= su.mean_overlap - 1e-12


class TestDeterminism:
    def test_identical_insert_order(self, rng):
        rects = [rand_rect(rng) for _ in range(300)]
        trees = []
        for _ in range(2):
            t = RTree(5)
            for i, r in enumerate(rects):
                t.insert(r, i)
            trees.append(t.flat())
        a, b = trees
        assert np.array_equal(a.node_bounds, b.node_bounds)
        assert np.array_equal(a.ent_payload, b.ent_payload)

    def test_bulk_deterministic(self, rng):
        entries = [(rand_rect(rng), i) for i in range(1000)]
        a = RTree.bulk_load(entries).flat()
        b = RTree.bulk_load(entries).flat()
        assert np.array_equal(a.node_bounds, b.node_bounds)
        assert np.array_equal(a.ent_payload, b.ent_payload)
