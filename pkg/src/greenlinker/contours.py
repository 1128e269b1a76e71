"""Separating-loop discovery: marching-squares contours of Green level sets.

A closed contour of {G = eps} that links the measure nontrivially certifies
that the Julia set (fiber or planar) is separated by a Fatou loop.  Contour
vertices are first placed by marching squares with log-scale interpolation
(the potential decays exponentially toward the filled set, so log G is the
right interpolant), then sharpened by bisection on the true potential along
their grid edges, and finally certified sample-by-sample.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels, orbits
from .errors import Undetermined, ValidationError
from .linking import LinkOpts, Mod1Rational, OrientedLoop, PolylineSegment, _link_by_winding
from .numerics import Poly1
from .skewdyn import SkewProduct, fiber_context

# cell index -> list of (edge, edge) connections; edges are
# 't' top, 'b' bottom, 'l' left, 'r' right of the cell; corner order used for
# the index is (i,j), (i,j+1), (i+1,j+1), (i+1,j) with bit set when G > level.
_MS_TABLE = {
    1: [("t", "l")], 2: [("t", "r")], 3: [("l", "r")], 4: [("r", "b")],
    5: [("t", "r"), ("l", "b")], 6: [("t", "b")], 7: [("l", "b")],
    8: [("l", "b")], 9: [("t", "b")], 10: [("t", "l"), ("r", "b")],
    11: [("r", "b")], 12: [("l", "r")], 13: [("t", "r")], 14: [("t", "l")],
}


@dataclass(frozen=True)
class GridField:
    """Scalar potential samples over a rectangular window."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs))


def green_field(spec, xs, ys, depth=None):
    """Kernel-evaluated potential over the grid (value 0 where bounded)."""
    if depth is None:
        depth = spec.n_steps
    depth = min(depth, spec.n_steps)
    W = xs[None, :] + 1j * ys[:, None]
    big = orbits.big_modulus(spec.d)
    value, esc, mstep = kernels.fiber_green_grid(
        spec.coeff_rows[:depth], spec.thresh[:depth], W.ravel(), big
    )
    return GridField(xs, ys, value.reshape(W.shape))


def green_values_at(spec, points, depth=None):
    """Vectorized potential values at arbitrary points (kernel-backed)."""
    if depth is None:
        depth = spec.n_steps
    depth = min(depth, spec.n_steps)
    big = orbits.big_modulus(spec.d)
    value, esc, mstep = kernels.fiber_green_grid(
        spec.coeff_rows[:depth], spec.thresh[:depth],
        np.asarray(points, complex).ravel(), big
    )
    return value


def _extract_contours(field, level):
    """Closed polylines of {G = level}; open chains are discarded with a
    warning.  Vertices are log-interpolated along grid edges."""
    F = field.values
    xs, ys = field.xs, field.ys
    H, W = F.shape
    above = F > level
    lg = np.where(F > 0, np.log(np.maximum(F, 1e-300)), -746.0)
    lv = np.log(level)

    pts = {}

    def epoint(kind, i, j):
        key = (kind, i, j)
        if key not in pts:
            if kind == "h":
                p = complex(xs[j], ys[i]); q = complex(xs[j + 1], ys[i])
                vp, vq = lg[i, j], lg[i, j + 1]
            else:
                p = complex(xs[j], ys[i]); q = complex(xs[j], ys[i + 1])
                vp, vq = lg[i, j], lg[i + 1, j]
            t = (lv - vp) / (vq - vp)
            pts[key] = (p + min(max(t, 0.0), 1.0) * (q - p), key)
        return key

    adj = {}

    def connect(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    for i in range(H - 1):
        for j in range(W - 1):
            idx = (above[i, j] * 1 + above[i, j + 1] * 2
                   + above[i + 1, j + 1] * 4 + above[i + 1, j] * 8)
            if idx in (0, 15):
                continue
            edge = {"t": ("h", i, j), "b": ("h", i + 1, j),
                    "l": ("v", i, j), "r": ("v", i, j + 1)}
            for a, b in _MS_TABLE[idx]:
                connect(epoint(*edge[a]), epoint(*edge[b]))

    used = set()
    closed, n_open = [], 0
    for start in adj:
        if start in used:
            continue
        path = [start]
        used.add(start)
        prev, cur = None, start
        while True:
            nxt = None
            for cand in adj[cur]:
                if cand != prev:
                    nxt = cand
                    break
            if nxt is None or nxt in used and nxt != start:
                n_open += 1
                break
            if nxt == start:
                closed.append([(pts[k][0], k) for k in path])
                break
            path.append(nxt)
            used.add(nxt)
            prev, cur = cur, nxt
    if n_open:
        warnings.warn(f"{n_open} open contour chain(s) at the grid boundary discarded")
    return closed


def _refine_vertices(spec, vertex_records, field, level, rounds=20, depth=None):
    """Bisection of each contour vertex along its grid edge onto the true
    {G = level} crossing, vectorized through the kernel."""
    xs, ys = field.xs, field.ys
    lo = np.empty(len(vertex_records), complex)
    hi = np.empty(len(vertex_records), complex)
    for n, (_, key) in enumerate(vertex_records):
        kind, i, j = key
        if kind == "h":
            a, b = complex(xs[j], ys[i]), complex(xs[j + 1], ys[i])
            va, vb = field.values[i, j], field.values[i, j + 1]
        else:
            a, b = complex(xs[j], ys[i]), complex(xs[j], ys[i + 1])
            va, vb = field.values[i, j], field.values[i + 1, j]
        if va > level:
            hi[n], lo[n] = a, b   # hi side above the level
        else:
            hi[n], lo[n] = b, a
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        gm = green_values_at(spec, mid, depth)
        above = gm > level
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _shoelace(points):
    x = points.real
    y = points.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _bbox_loop(points, margin, ambient, base):
    """Counterclockwise rectangle around a vertex cloud, expanded by margin."""
    x0, x1 = float(np.min(points.real)) - margin, float(np.max(points.real)) + margin
    y0, y1 = float(np.min(points.imag)) - margin, float(np.max(points.imag)) + margin
    corners = (complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1),
               complex(x0, y0))
    return OrientedLoop((PolylineSegment(corners),), ambient, base)


def find_separating_loops(source, level, window, resolution=600,
                          opts=LinkOpts(), fiber=None, depth=None):
    """Level-set loops of the potential, each with its exact linking number.

    source : Poly1 (planar dynamics) or SkewProduct (with `fiber` = z0).
    level  : contour level eps > 0.
    window : (center, half_width, half_height) in the loop's plane.
    Returns a list of (OrientedLoop, Mod1Rational, WindingCertificate),
    positively oriented; loops whose vertices fail certification
    (G >= eps/2 everywhere) are discarded with a warning.  No closed contour
    at all returns an empty list.
    """
    if level <= 0:
        raise ValidationError("contour level must be positive")
    center, hw, hh = complex(window[0]), float(window[1]), float(window[2])

    if isinstance(source, SkewProduct):
        if fiber is None:
            raise ValidationError("fiber base needed for skew-product contours")
        ctx = fiber_context(source, fiber, max(opts.max_depth + 2, 200))
        spec = ctx.spec
        ambient, base = "fiber", complex(fiber)
        link = lambda lp: _link_by_winding(spec, lp, opts)
    else:
        g = source if isinstance(source, Poly1) else Poly1(source)
        spec = orbits.spec_from_poly(g, max(opts.max_depth + 2, 200))
        ambient, base = "plane", None
        link = lambda lp: _link_by_winding(spec, lp, opts)

    xs = center.real + np.linspace(-hw, hw, resolution)
    ys = center.imag + np.linspace(-hh, hh, resolution)
    field = green_field(spec, xs, ys, depth)
    chains = _extract_contours(field, level)

    pixel = max(xs[1] - xs[0], ys[1] - ys[0]) if resolution > 1 else hw

    out = []
    for chain in chains:
        refined = _refine_vertices(spec, chain, field, level, depth=depth)
        gv = green_values_at(spec, refined, depth)
        if np.min(gv) < level / 2:
            warnings.warn(
                f"contour with {len(refined)} vertices failed certification "
                f"(min G = {np.min(gv):.3g} < eps/2); discarded"
            )
            continue
        pts = tuple(refined) + (refined[0],)
        loop = OrientedLoop((PolylineSegment(pts),), ambient, base)
        if _shoelace(refined) < 0:
            loop = loop.reversed()
        picked = None
        try:
            picked = (loop, *link(loop))
        except Undetermined:
            # The polyline cut a corner of the fractal level set.  Fall back
            # to the component's bounding rectangle: a coarser separating
            # loop around the same piece, certified on its own terms.
            for margin in (2 * pixel, pixel, 4 * pixel):
                rect = _bbox_loop(refined, margin, ambient, base)
                try:
                    picked = (rect, *link(rect))
                    break
                except Undetermined:
                    continue
            if picked is None:
                warnings.warn(
                    f"contour with {len(refined)} vertices did not certify, nor "
                    "did its bounding rectangle; discarded"
                )
                continue
        out.append(picked)
    # deterministic order: by centroid, lexicographic
    out.sort(key=lambda t: (round(t[0].centroid().real, 9), round(t[0].centroid().imag, 9)))
    return out
