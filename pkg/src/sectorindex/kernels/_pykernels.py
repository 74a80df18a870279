"""NumPy kernel backend.

Tree searches run a level-at-a-time breadth-first traversal with the
rectangle predicate vectorized over each frontier, so the fallback stays
usable at millions of entries. Result order and visit counts match the
compiled backend exactly: entries are emitted in BFS order and every
tested node counts as one visit.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_EPS = 1e-9  # matches geometry.EPS_SCALE
_EMPTY = np.empty(0, dtype=np.int64)


def _ranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenate arange(start, start+count) for every pair (counts >= 1)."""
    total = int(counts.sum())
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    if len(starts) > 1:
        idx = np.cumsum(counts[:-1])
        out[idx] = starts[1:] - (starts[:-1] + counts[:-1] - 1)
    return np.cumsum(out)


def _bfs_query(nb, nk, nf, nc, ep, rect_test):
    """Shared traversal: rect_test maps an (m, 4) bounds array to a bool mask."""
    if nb.shape[0] == 0:
        return _EMPTY, 0
    frontier = np.zeros(1, dtype=np.int64)
    visits = 0
    chunks = []
    while frontier.size:
        visits += int(frontier.size)
        live = frontier[rect_test(nb[frontier])]
        is_leaf = nk[live] == 1
        leaves = live[is_leaf]
        if leaves.size:
            eidx = _ranges(nf[leaves], nc[leaves])
            chunks.append(eidx)
        internal = live[~is_leaf]
        if internal.size:
            frontier = _ranges(nf[internal], nc[internal])
        else:
            frontier = _EMPTY
    if not chunks:
        return _EMPTY, visits
    eidx = np.concatenate(chunks)
    return eidx, visits


def point_query(nb, nk, nf, nc, eb, ep, x, y):
    """Payloads of entries whose rectangle contains (x, y); closed test."""
    eps = _EPS * max(1.0, abs(x), abs(y))

    def test(b):
        return (
            (b[:, 0] - eps <= x)
            & (x <= b[:, 2] + eps)
            & (b[:, 1] - eps <= y)
            & (y <= b[:, 3] + eps)
        )

    eidx, visits = _bfs_query(nb, nk, nf, nc, ep, test)
    if eidx.size:
        eidx = eidx[test(eb[eidx])]
    return ep[eidx] if eidx.size else _EMPTY, visits


def line_query(nb, nk, nf, nc, eb, ep, nx, ny, rho):
    """Payloads of entries whose rectangle meets the line nx*u + ny*v = rho."""

    def test(b):
        d00 = b[:, 0] * nx + b[:, 1] * ny - rho
        d01 = b[:, 0] * nx + b[:, 3] * ny - rho
        d10 = b[:, 2] * nx + b[:, 1] * ny - rho
        d11 = b[:, 2] * nx + b[:, 3] * ny - rho
        lo = np.minimum(np.minimum(d00, d01), np.minimum(d10, d11))
        hi = np.maximum(np.maximum(d00, d01), np.maximum(d10, d11))
        m = np.maximum(np.abs(b[:, 0]), np.abs(b[:, 1]))
        m = np.maximum(m, np.abs(b[:, 2]))
        m = np.maximum(m, np.abs(b[:, 3]))
        eps = _EPS * np.maximum(m, max(1.0, abs(rho)))
        return (lo <= eps) & (hi >= -eps)

    eidx, visits = _bfs_query(nb, nk, nf, nc, ep, test)
    if eidx.size:
        eidx = eidx[test(eb[eidx])]
    return ep[eidx] if eidx.size else _EMPTY, visits


def sinusoid_query(nb, nk, nf, nc, eb, ep, a, b):
    """Payloads of entries whose rectangle meets rho(t) = a*cos t + b*sin t.

    Per rectangle: the exact min/max of the sinusoid over the theta span
    (two images plus the interior extremum) against the rho range.
    """
    amp = math.hypot(a, b)
    alpha = math.atan2(b, a)
    theta_c = alpha % math.pi
    extremum = amp if math.cos(theta_c - alpha) > 0.0 else -amp
    eps_r = _EPS * max(1.0, amp)

    def test(bb):
        v1 = amp * np.cos(bb[:, 0] - alpha)
        v2 = amp * np.cos(bb[:, 2] - alpha)
        lo = np.minimum(v1, v2)
        hi = np.maximum(v1, v2)
        inside = (bb[:, 0] < theta_c) & (theta_c < bb[:, 2])
        if extremum >= 0.0:
            hi = np.where(inside, np.maximum(hi, extremum), hi)
        else:
            lo = np.where(inside, np.minimum(lo, extremum), lo)
        return (hi >= bb[:, 1] - eps_r) & (lo <= bb[:, 3] + eps_r)

    eidx, visits = _bfs_query(nb, nk, nf, nc, ep, test)
    if eidx.size:
        eidx = eidx[test(eb[eidx])]
    return ep[eidx] if eidx.size else _EMPTY, visits


def _mono_mask(ax, ay, n1x, n1y, n2x, n2y, x, y):
    dx = x - ax
    dy = y - ay
    eps = _EPS * np.maximum(
        np.maximum(np.abs(ax), np.abs(ay)), max(1.0, abs(x), abs(y))
    )
    return (dx * n1x + dy * n1y >= -eps) & (dx * n2x + dy * n2y >= -eps)


def scan_mono(ax, ay, n1x, n1y, n2x, n2y, x, y):
    """Indices of sectors whose closed mono wedge contains (x, y)."""
    return np.nonzero(_mono_mask(ax, ay, n1x, n1y, n2x, n2y, x, y))[0].astype(np.int64)


def filter_mono(ax, ay, n1x, n1y, n2x, n2y, ids, x, y):
    """Subset of ``ids`` whose mono wedge contains (x, y), order preserved."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size == 0:
        return _EMPTY
    keep = _mono_mask(ax[ids], ay[ids], n1x[ids], n1y[ids], n2x[ids], n2y[ids], x, y)
    return ids[keep]
