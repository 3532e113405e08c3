# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Sturm-sequence kernels; same contract as ``_sturm_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2,
                       const double[::1] m, double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t i, n = d.shape[0], neg = 0
    cdef double q = d[0] - x * m[0]
    if fabs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        neg += 1
    for i in range(1, n):
        q = d[i] - x * m[i] - e2[i - 1] / q
        if fabs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            neg += 1
    return neg


cdef inline double _midpoint(double lo, double hi) noexcept nogil:
    if lo > 0.0 and hi > 2.0 * lo:
        return sqrt(lo * hi)
    if hi < 0.0 and lo < 2.0 * hi:
        return -sqrt(lo * hi)
    return 0.5 * (lo + hi)


def sturm_count(d, e2, m, double x, double pivmin):
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(e2, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef Py_ssize_t c
    with nogil:
        c = _count(dv, ev, mv, x, pivmin)
    return int(c)


def bisect_lowest(d, e2, m, Py_ssize_t count, double lo, double hi,
                  double rtol, double atol, Py_ssize_t maxiter, double pivmin):
    cdef const double[::1] dv = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(e2, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    lower_a = np.full(count, lo)
    upper_a = np.full(count, hi)
    done_a = np.ones(count, dtype=np.uint8)
    cdef double[::1] lower = lower_a
    cdef double[::1] upper = upper_a
    cdef unsigned char[::1] done = done_a
    cdef Py_ssize_t k, j, it, c
    cdef double a, b, x, w
    with nogil:
        for k in range(count):
            a = lower[k]
            b = upper[k]
            it = 0
            while True:
                w = rtol * (fabs(a) if fabs(a) > fabs(b) else fabs(b))
                if w < atol:
                    w = atol
                if b - a <= w:
                    break
                if it >= maxiter:
                    done[k] = 0
                    break
                x = _midpoint(a, b)
                if not (a < x < b):
                    break
                c = _count(dv, ev, mv, x, pivmin)
                for j in range(k, count):
                    if j < c:
                        if x < upper[j]:
                            upper[j] = x
                    elif x > lower[j]:
                        lower[j] = x
                a = lower[k]
                b = upper[k]
                it += 1
    return 0.5 * (lower_a + upper_a), lower_a, upper_a, done_a.astype(bool)
