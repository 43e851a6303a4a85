# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-loop kernels.

Same contracts as `_pair_py`; these are the O(n^2) inner loops that
dominate runtime on large inputs, written against typed memoryviews so
callers pass contiguous float64 buffers.
"""


def kendall_pair_counts(double[::1] x, double[::1] y):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef long long concordant = 0, discordant = 0
    cdef long long ties_x = 0, ties_y = 0, ties_xy = 0
    cdef double xi, yi, dx, dy
    for i in range(n - 1):
        xi = x[i]
        yi = y[i]
        for j in range(i + 1, n):
            dx = x[j] - xi
            dy = y[j] - yi
            if dx == 0.0 and dy == 0.0:
                ties_xy += 1
            elif dx == 0.0:
                ties_x += 1
            elif dy == 0.0:
                ties_y += 1
            elif (dx > 0.0) == (dy > 0.0):
                concordant += 1
            else:
                discordant += 1
    return concordant, discordant, ties_x, ties_y, ties_xy


def mann_kendall_s(double[::1] x):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef long long s = 0
    cdef double xi, d
    for i in range(n - 1):
        xi = x[i]
        for j in range(i + 1, n):
            d = x[j] - xi
            if d > 0.0:
                s += 1
            elif d < 0.0:
                s -= 1
    return s


def dominance_matrix(double[:, ::1] values, unsigned char[:, ::1] present,
                     unsigned char[:, ::1] out):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t width = values.shape[1]
    cdef Py_ssize_t i, k, b
    cdef bint comparable, dominates
    for i in range(n):
        for k in range(n):
            out[i, k] = 0
            if i == k:
                continue
            comparable = False
            dominates = True
            for b in range(width):
                if present[i, b] and present[k, b]:
                    comparable = True
                    if not values[i, b] > values[k, b]:
                        dominates = False
                        break
            if comparable and dominates:
                out[i, k] = 1
    return out
