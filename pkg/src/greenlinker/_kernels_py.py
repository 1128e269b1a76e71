"""Pure-Python (numpy-vectorized) implementations of the hot grid kernels.

Mirrors greenlinker._kernels (the Cython extension) exactly; selected at
import time by greenlinker.kernels when the extension is unavailable or
GREENLINKER_PURE=1.
"""

import numpy as np

BACKEND = "python"


def fiber_green_grid(coeff_rows, thresh, w0, big):
    """Escape-time + refined potential over a batch of fiber starting points.

    coeff_rows : complex128 (n_steps, d+1), ascending coefficients of the
                 fiber map at each orbit step (row n is the map leaving
                 time n).
    thresh     : float64 (n_steps,), certified escape threshold at each step.
    w0         : complex128 (N,) starting fiber coordinates.
    big        : stop refining once |w| exceeds this (overflow guard).

    Returns (value, esc, mstep):
      esc[i]   = first step n with |w_n| > thresh[n], or -1 if none within
                 n_steps.
      value[i] = log|w_m| / d^m at the refinement stop m (0 where esc=-1).
      mstep[i] = m, the depth at which value was read (-1 where esc=-1).
    """
    coeff_rows = np.ascontiguousarray(coeff_rows, dtype=np.complex128)
    thresh = np.ascontiguousarray(thresh, dtype=np.float64)
    w = np.array(w0, dtype=np.complex128).ravel()
    n_steps, dp1 = coeff_rows.shape
    d = dp1 - 1
    n_pts = w.size

    esc = np.full(n_pts, -1, dtype=np.int32)
    mstep = np.full(n_pts, -1, dtype=np.int32)
    value = np.zeros(n_pts, dtype=np.float64)

    active = np.ones(n_pts, dtype=bool)      # not yet escaped
    refining = np.zeros(n_pts, dtype=bool)   # escaped, still below `big`

    for n in range(n_steps):
        a = np.abs(w)
        newly = active & (a > thresh[n])
        if newly.any():
            esc[newly] = n
            active &= ~newly
            refining |= newly

        done = refining & (a > big)
        if done.any():
            value[done] = np.log(a[done]) / float(d) ** n
            mstep[done] = n
            refining &= ~done

        run = active | refining
        if not run.any():
            break
        wr = w[run]
        acc = np.full(wr.shape, coeff_rows[n, d], dtype=np.complex128)
        for k in range(d - 1, -1, -1):
            acc = acc * wr + coeff_rows[n, k]
        w[run] = acc

    if refining.any():
        value[refining] = np.log(np.abs(w[refining])) / float(d) ** n_steps
        mstep[refining] = n_steps
    return value, esc, mstep


def mandelbrot_grid(c, max_iter):
    """First escape step of the critical orbit of w^2 + c, or -1.

    Escape test |w| > max(2, |c|); w_0 = c (the image of the critical point).
    """
    c = np.array(c, dtype=np.complex128).ravel()
    w = c.copy()
    esc = np.full(c.size, -1, dtype=np.int32)
    radius = np.maximum(2.0, np.abs(c))
    active = np.ones(c.size, dtype=bool)
    for n in range(1, max_iter + 1):
        out = active & (np.abs(w) > radius)
        if out.any():
            esc[out] = n
            active &= ~out
        if not active.any():
            break
        w[active] = w[active] * w[active] + c[active]
    return esc
