"""Compiled and NumPy kernel backends must agree exactly: same payloads,
same order, same visit counts."""

import math

import numpy as np
import pytest

from sectorindex import kernels
from sectorindex.geometry import Rect
from sectorindex.rtree import RTree

from conftest import rand_sector_set
from test_rtree import build_random

pytestmark = pytest.mark.skipif(
    "compiled" not in kernels.available(),
    reason="compiled backend not built",
)

KC = kernels.get("compiled")
KP = kernels.get("python")


def test_available_and_get():
    assert set(kernels.available()) >= {"python"}
    assert kernels.get("python").BACKEND == "python"
    assert kernels.default().BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.get("gpu")


def test_point_query_parity(rng):
    for _ in range(30):
        tree, _ = build_random(rng, int(rng.integers(0, 400)))
        for _ in range(10):
            x, y = rng.uniform(-10, 110, 2)
            rc, vc = tree.search_point(x, y, kernel=KC)
            rp, vp = tree.search_point(x, y, kernel=KP)
            assert np.array_equal(rc, rp)
            assert vc == vp


def test_line_query_parity(rng):
    for _ in range(30):
        tree, _ = build_random(rng, int(rng.integers(1, 400)))
        for _ in range(10):
            t = rng.uniform(0, math.pi)
            rho = rng.uniform(-50, 150)
            rc, vc = tree.search_line(math.cos(t), math.sin(t), rho, kernel=KC)
            rp, vp = tree.search_line(math.cos(t), math.sin(t), rho, kernel=KP)
            assert np.array_equal(rc, rp)
            assert vc == vp


def test_sinusoid_query_parity(rng):
    # polar-shaped trees: theta in [0, pi], rho in +/- span
    for _ in range(20):
        n = int(rng.integers(1, 300))
        t0 = rng.uniform(0, math.pi - 1e-3, n)
        t1 = np.minimum(t0 + rng.exponential(0.05, n), math.pi)
        r0 = rng.uniform(-100, 100, n)
        r1 = r0 + rng.exponential(3.0, n)
        bounds = np.column_stack([t0, r0, t1, r1])
        tree = RTree.bulk_load(bounds=bounds, payloads=np.arange(n))
        for _ in range(10):
            a, b = rng.uniform(-100, 100, 2)
            rc, vc = tree.search_sinusoid(a, b, kernel=KC)
            rp, vp = tree.search_sinusoid(a, b, kernel=KP)
            assert np.array_equal(rc, rp)
            assert vc == vp


def test_scan_and_filter_parity(rng):
    ss = rand_sector_set(rng, 5000)
    args = ss.mono_args()
    for _ in range(50):
        x, y = rng.uniform(0, 10_000, 2)
        sc = KC.scan_mono(*args, x, y)
        sp = KP.scan_mono(*args, x, y)
        assert np.array_equal(sc, sp)
        ids = rng.integers(0, 5000, 64)
        fc = KC.filter_mono(*args, ids, x, y)
        fp = KP.filter_mono(*args, ids, x, y)
        assert np.array_equal(fc, fp)


def test_bfs_candidate_order_matches(rng):
    # the traversal contract: entries reported in BFS order in both backends
    tree, entries = build_random(rng, 300)
    x, y = 50.0, 50.0
    rc, _ = tree.search_point(x, y, kernel=KC)
    rp, _ = tree.search_point(x, y, kernel=KP)
    assert rc.tolist() == rp.tolist()
    got = set(rc.tolist())
    eps = 1e-9 * max(1.0, x, y)
    want = {p for r, p in entries if r.contains_point(x, y, eps)}
    assert got == want
