# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled heat-bath kernel on plane-partition heights.

Must stay line-for-line equivalent to ``_heatbath_py``; the test-suite runs
both on identical inputs and compares the resulting arrays.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline long _resample(long[:, ::1] H, Py_ssize_t r, Py_ssize_t j,
                           double u, double ix, long c) nogil:
    cdef Py_ssize_t a = H.shape[0]
    cdef Py_ssize_t n = H.shape[1]
    cdef long up = c, down = 0, hi, lo, h
    cdef bint top = r > 0
    cdef bint bot = r < a - 1
    cdef double z = 0.0, w, target, acc
    if top:
        up = H[r - 1, j]
    if bot:
        down = H[r + 1, j]
    hi = up
    if j > 0 and H[r, j - 1] < hi:
        hi = H[r, j - 1]
    lo = down
    if j < n - 1 and H[r, j + 1] > lo:
        lo = H[r, j + 1]
    if lo == hi:
        return lo
    for h in range(lo, hi + 1):
        w = 1.0
        if top and h < up:
            w *= ix
        if bot and h > down:
            w *= ix
        z += w
    target = u * z
    acc = 0.0
    for h in range(lo, hi + 1):
        w = 1.0
        if top and h < up:
            w *= ix
        if bot and h > down:
            w *= ix
        acc += w
        if target < acc:
            return h
    return hi


def update_site(long[:, ::1] H, Py_ssize_t r, Py_ssize_t j, double u, double x, long c):
    """Resample H[r, j] in place; returns the new height."""
    cdef long h = _resample(H, r, j, u, 1.0 / x, c)
    H[r, j] = h
    return h


def sweep(long[:, ::1] H, double[:, ::1] U, double x, long c):
    """One row-major pass over all sites, site (r, j) consuming U[r, j]."""
    cdef Py_ssize_t r, j
    cdef double ix = 1.0 / x
    with nogil:
        for r in range(H.shape[0]):
            for j in range(H.shape[1]):
                H[r, j] = _resample(H, r, j, U[r, j], ix, c)


def coupled_sweep(long[:, ::1] lower, long[:, ::1] upper, double[:, ::1] U, double x, long c):
    """Sweep two chains with the same variates; returns True if they now agree."""
    cdef Py_ssize_t r, j
    cdef double ix = 1.0 / x
    cdef bint same = True
    with nogil:
        for r in range(lower.shape[0]):
            for j in range(lower.shape[1]):
                lower[r, j] = _resample(lower, r, j, U[r, j], ix, c)
                upper[r, j] = _resample(upper, r, j, U[r, j], ix, c)
        for r in range(lower.shape[0]):
            for j in range(lower.shape[1]):
                if lower[r, j] != upper[r, j]:
                    same = False
    return same
