# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid kernels: escape-time iteration with potential refinement.

Semantics are defined by greenlinker._kernels_py; this module must return
the same results (same comparisons, same order of operations per point).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport hypot, log

cnp.import_array()

BACKEND = "cython"


def fiber_green_grid(coeff_rows, thresh, w0, double big):
    coeff_rows = np.ascontiguousarray(coeff_rows, dtype=np.complex128)
    thresh = np.ascontiguousarray(thresh, dtype=np.float64)
    w0 = np.ascontiguousarray(np.asarray(w0, dtype=np.complex128).ravel())

    cdef double complex[:, ::1] cr = coeff_rows
    cdef double[::1] th = thresh
    cdef double complex[::1] w_in = w0
    cdef Py_ssize_t n_steps = cr.shape[0]
    cdef Py_ssize_t d = cr.shape[1] - 1
    cdef Py_ssize_t n_pts = w_in.shape[0]

    value_arr = np.zeros(n_pts, dtype=np.float64)
    esc_arr = np.full(n_pts, -1, dtype=np.int32)
    m_arr = np.full(n_pts, -1, dtype=np.int32)
    cdef double[::1] value = value_arr
    cdef int[::1] esc = esc_arr
    cdef int[::1] mstep = m_arr

    cdef Py_ssize_t i, n, k
    cdef double complex w, acc
    cdef double a, dd = <double> d
    cdef int escaped, finished
    with nogil:
        for i in range(n_pts):
            w = w_in[i]
            escaped = 0
            finished = 0
            for n in range(n_steps):
                a = hypot(w.real, w.imag)
                if not escaped:
                    if a > th[n]:
                        escaped = 1
                        esc[i] = <int> n
                if escaped:
                    if a > big:
                        value[i] = log(a) / dd ** n
                        mstep[i] = <int> n
                        finished = 1
                        break
                acc = cr[n, d]
                for k in range(d - 1, -1, -1):
                    acc = acc * w + cr[n, k]
                w = acc
            if escaped and not finished:
                a = hypot(w.real, w.imag)
                value[i] = log(a) / dd ** n_steps
                mstep[i] = <int> n_steps
    return value_arr, esc_arr, m_arr


def mandelbrot_grid(c, int max_iter):
    c = np.ascontiguousarray(np.asarray(c, dtype=np.complex128).ravel())
    cdef double complex[::1] cv = c
    cdef Py_ssize_t n_pts = cv.shape[0]
    esc_arr = np.full(n_pts, -1, dtype=np.int32)
    cdef int[::1] esc = esc_arr
    cdef Py_ssize_t i
    cdef int n
    cdef double complex w, ci
    cdef double radius, a
    with nogil:
        for i in range(n_pts):
            ci = cv[i]
            a = hypot(ci.real, ci.imag)
            radius = 2.0 if a < 2.0 else a
            w = ci
            for n in range(1, max_iter + 1):
                a = hypot(w.real, w.imag)
                if a > radius:
                    esc[i] = n
                    break
                w = w * w + ci
    return esc_arr
