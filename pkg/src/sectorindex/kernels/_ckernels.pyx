# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Scalar FIFO breadth-first traversals over the flattened tree arrays.
Semantics (tolerances, result order, visit counts) match the NumPy
backend in ``_pykernels`` exactly.
"""

import numpy as np

from libc.math cimport atan2, cos, fabs, fmax, fmin, fmod, hypot

BACKEND = "compiled"

cdef double EPS = 1e-9  # matches geometry.EPS_SCALE
cdef double PI = 3.141592653589793


cdef inline double _fmax4(double a, double b, double c, double d) noexcept nogil:
    return fmax(fmax(a, b), fmax(c, d))


cdef inline bint _point_hit(double b0, double b1, double b2, double b3,
                            double x, double y, double eps) noexcept nogil:
    return (b0 - eps <= x <= b2 + eps) and (b1 - eps <= y <= b3 + eps)


cdef inline bint _line_hit(double b0, double b1, double b2, double b3,
                           double nx, double ny, double rho) noexcept nogil:
    cdef double d00 = b0 * nx + b1 * ny - rho
    cdef double d01 = b0 * nx + b3 * ny - rho
    cdef double d10 = b2 * nx + b1 * ny - rho
    cdef double d11 = b2 * nx + b3 * ny - rho
    cdef double lo = fmin(fmin(d00, d01), fmin(d10, d11))
    cdef double hi = fmax(fmax(d00, d01), fmax(d10, d11))
    cdef double eps = EPS * fmax(
        _fmax4(fabs(b0), fabs(b1), fabs(b2), fabs(b3)), fmax(1.0, fabs(rho))
    )
    return lo <= eps and hi >= -eps


cdef inline bint _sin_hit(double b0, double b1, double b2, double b3,
                          double amp, double alpha, double theta_c,
                          double extremum, double eps_r) noexcept nogil:
    cdef double v1 = amp * cos(b0 - alpha)
    cdef double v2 = amp * cos(b2 - alpha)
    cdef double lo = fmin(v1, v2)
    cdef double hi = fmax(v1, v2)
    if b0 < theta_c < b2:
        if extremum >= 0.0:
            hi = fmax(hi, extremum)
        else:
            lo = fmin(lo, extremum)
    return hi >= b1 - eps_r and lo <= b3 + eps_r


# query kind selectors for the shared traversal
cdef int KIND_POINT = 0
cdef int KIND_LINE = 1
cdef int KIND_SIN = 2


cdef _traverse(double[:, ::1] nb, unsigned char[::1] nk,
               long long[::1] nf, long long[::1] nc,
               double[:, ::1] eb, long long[::1] ep,
               int kind, double p0, double p1, double p2, double p3, double p4):
    """Shared BFS; (p0..p4) are the kind-specific query parameters."""
    cdef Py_ssize_t nn = nb.shape[0]
    if nn == 0:
        return np.empty(0, dtype=np.int64), 0
    queue = np.empty(1024, dtype=np.int64)
    cdef long long[::1] qv = queue
    out = np.empty(1024, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef Py_ssize_t head = 0, tail = 1, out_n = 0
    cdef Py_ssize_t i, e, first, count
    cdef long long visits = 0
    cdef bint hit
    qv[0] = 0
    while head < tail:
        i = qv[head]
        head += 1
        visits += 1
        if kind == KIND_POINT:
            hit = _point_hit(nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3], p0, p1, p2)
        elif kind == KIND_LINE:
            hit = _line_hit(nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3], p0, p1, p2)
        else:
            hit = _sin_hit(nb[i, 0], nb[i, 1], nb[i, 2], nb[i, 3],
                           p0, p1, p2, p3, p4)
        if not hit:
            continue
        first = nf[i]
        count = nc[i]
        if nk[i] == 1:
            for e in range(first, first + count):
                if kind == KIND_POINT:
                    hit = _point_hit(eb[e, 0], eb[e, 1], eb[e, 2], eb[e, 3],
                                     p0, p1, p2)
                elif kind == KIND_LINE:
                    hit = _line_hit(eb[e, 0], eb[e, 1], eb[e, 2], eb[e, 3],
                                    p0, p1, p2)
                else:
                    hit = _sin_hit(eb[e, 0], eb[e, 1], eb[e, 2], eb[e, 3],
                                   p0, p1, p2, p3, p4)
                if hit:
                    if out_n == ov.shape[0]:
                        out = np.concatenate([out, np.empty(out_n, dtype=np.int64)])
                        ov = out
                    ov[out_n] = ep[e]
                    out_n += 1
        else:
            if tail + count > qv.shape[0]:
                queue = np.concatenate(
                    [queue, np.empty(max(qv.shape[0], <Py_ssize_t>count), dtype=np.int64)]
                )
                qv = queue
            for e in range(first, first + count):
                qv[tail] = e
                tail += 1
    return np.asarray(out)[:out_n].copy(), int(visits)


def point_query(double[:, ::1] nb, unsigned char[::1] nk,
                long long[::1] nf, long long[::1] nc,
                double[:, ::1] eb, long long[::1] ep, double x, double y):
    cdef double eps = EPS * fmax(1.0, fmax(fabs(x), fabs(y)))
    return _traverse(nb, nk, nf, nc, eb, ep, KIND_POINT, x, y, eps, 0.0, 0.0)


def line_query(double[:, ::1] nb, unsigned char[::1] nk,
               long long[::1] nf, long long[::1] nc,
               double[:, ::1] eb, long long[::1] ep,
               double nx, double ny, double rho):
    return _traverse(nb, nk, nf, nc, eb, ep, KIND_LINE, nx, ny, rho, 0.0, 0.0)


def sinusoid_query(double[:, ::1] nb, unsigned char[::1] nk,
                   long long[::1] nf, long long[::1] nc,
                   double[:, ::1] eb, long long[::1] ep, double a, double b):
    cdef double amp = hypot(a, b)
    cdef double alpha = atan2(b, a)
    # Python-style mod: result in [0, pi), matching the NumPy backend
    cdef double theta_c = fmod(alpha, PI)
    if theta_c < 0.0:
        theta_c += PI
    cdef double extremum = amp if cos(theta_c - alpha) > 0.0 else -amp
    cdef double eps_r = EPS * fmax(1.0, amp)
    return _traverse(nb, nk, nf, nc, eb, ep, KIND_SIN,
                     amp, alpha, theta_c, extremum, eps_r)


cdef inline bint _mono_hit(double ax, double ay, double n1x, double n1y,
                           double n2x, double n2y, double x, double y,
                           double base) noexcept nogil:
    cdef double eps = EPS * fmax(fmax(fabs(ax), fabs(ay)), base)
    cdef double dx = x - ax
    cdef double dy = y - ay
    return (dx * n1x + dy * n1y >= -eps) and (dx * n2x + dy * n2y >= -eps)


def scan_mono(double[::1] ax, double[::1] ay,
              double[::1] n1x, double[::1] n1y,
              double[::1] n2x, double[::1] n2y, double x, double y):
    cdef Py_ssize_t n = ax.shape[0]
    cdef double base = fmax(1.0, fmax(fabs(x), fabs(y)))
    out = np.empty(1024, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef Py_ssize_t out_n = 0, i
    for i in range(n):
        if _mono_hit(ax[i], ay[i], n1x[i], n1y[i], n2x[i], n2y[i], x, y, base):
            if out_n == ov.shape[0]:
                out = np.concatenate([out, np.empty(out_n, dtype=np.int64)])
                ov = out
            ov[out_n] = i
            out_n += 1
    return np.asarray(out)[:out_n].copy()


def filter_mono(double[::1] ax, double[::1] ay,
                double[::1] n1x, double[::1] n1y,
                double[::1] n2x, double[::1] n2y, ids, double x, double y):
    ids_arr = np.ascontiguousarray(ids, dtype=np.int64)
    cdef long long[::1] iv = ids_arr
    cdef Py_ssize_t n = iv.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    cdef double base = fmax(1.0, fmax(fabs(x), fabs(y)))
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef Py_ssize_t out_n = 0, i
    cdef long long s
    for i in range(n):
        s = iv[i]
        if _mono_hit(ax[s], ay[s], n1x[s], n1y[s], n2x[s], n2y[s], x, y, base):
            ov[out_n] = s
            out_n += 1
    return np.asarray(out)[:out_n].copy()