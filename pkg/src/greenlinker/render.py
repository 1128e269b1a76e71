"""Grid evaluation and image emission.

Renders are plain label grids plus a binary PPM (P6) writer with a fixed
palette and a JSON sidecar carrying legend, window and parameters: bit-exact,
dependency-free, diffable.  Pixel (row 0, col 0) is the top-left corner;
rows advance downward in imaginary part.
"""

import json
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, orbits
from .errors import ValidationError
from .numerics import escape_radius_fiberwise
from .skewdyn import SkewProduct, fiber_context

LABEL_ESCAPE = 1      # vertical escape certified within depth
LABEL_BOUNDED = 0     # below threshold through depth
LABEL_UNDETERMINED = 2

PALETTE = {
    LABEL_BOUNDED: (64, 64, 64),        # dark grey: fiber filled set
    LABEL_ESCAPE: (200, 200, 200),      # light grey: vertical escape
    LABEL_UNDETERMINED: (255, 0, 0),
}

MANDEL_INSIDE = 0
MANDEL_OUTSIDE = 1

PARAM_PALETTE = {
    MANDEL_INSIDE: (32, 32, 96),        # ball-basins
    MANDEL_OUTSIDE: (220, 220, 220),    # infinitely generated vertical basin
}


@dataclass(frozen=True)
class ImageGrid:
    width: int
    height: int
    center: complex
    half_width: float
    half_height: float
    pixels: np.ndarray          # (height, width) int labels or scalars
    mode: str
    legend: dict
    params: dict = field(default_factory=dict)

    def pixel_center(self, row, col):
        x = self.center.real - self.half_width + (col + 0.5) * self.pixel_dx
        y = self.center.imag + self.half_height - (row + 0.5) * self.pixel_dy
        return complex(x, y)

    @property
    def pixel_dx(self):
        return 2 * self.half_width / self.width

    @property
    def pixel_dy(self):
        return 2 * self.half_height / self.height

    def grid_points(self):
        xs = self.center.real - self.half_width + (np.arange(self.width) + 0.5) * self.pixel_dx
        ys = self.center.imag + self.half_height - (np.arange(self.height) + 0.5) * self.pixel_dy
        return xs[None, :] + 1j * ys[:, None]

    def sidecar(self):
        return {
            "mode": self.mode,
            "resolution": [self.width, self.height],
            "window": {
                "center": [self.center.real, self.center.imag],
                "half_extents": [self.half_width, self.half_height],
            },
            "legend": self.legend,
            "palette": {str(k): list(v) for k, v in self.legend_palette().items()},
            **self.params,
        }

    def legend_palette(self):
        return PALETTE if self.mode == "fiber" else PARAM_PALETTE


def default_fiber_window(f, z0, margin=0.25):
    """Window containing the fiber filled set with the given relative margin.

    The filled set lies inside the fiberwise escape radius taken over the
    base orbit's modulus bound."""
    ctx = fiber_context(f, z0, 64)
    zb = float(np.max(np.abs(ctx.base_orbit)))
    r = escape_radius_fiberwise(f.q, zb)
    half = (1 + margin) * r
    return (0j, half, half)


def _run_chunked(fn, items, threads):
    if threads <= 1:
        return [fn(c) for c in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def render_fiber(f, z0, window=None, resolution=600, depth=60, threads=1):
    """Label each pixel of the fiber over z0: vertical escape within depth,
    or bounded-through-depth.  Deterministic for any thread count."""
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    if window is None:
        window = default_fiber_window(f, z0)
    center, hw, hh = complex(window[0]), float(window[1]), float(window[2])
    if isinstance(resolution, int):
        width = height = resolution
    else:
        width, height = resolution

    ctx = fiber_context(f, z0, max(depth, 8))
    spec = ctx.spec
    grid = ImageGrid(width, height, center, hw, hh,
                     np.zeros((height, width), dtype=np.int8), "fiber",
                     {str(LABEL_BOUNDED): "bounded-through-depth",
                      str(LABEL_ESCAPE): "vertical-escape",
                      str(LABEL_UNDETERMINED): "undetermined"},
                     {"map": "skew", "z0": [complex(z0).real, complex(z0).imag],
                      "depth": depth})
    pts = grid.grid_points()
    big = orbits.big_modulus(spec.d)
    rows = spec.coeff_rows[:depth]
    thr = spec.thresh[:depth]

    chunks = np.array_split(np.arange(height), max(1, min(threads * 4, height)))

    def work(rows_idx):
        sub = pts[rows_idx].ravel()
        _, esc, _ = kernels.fiber_green_grid(rows, thr, sub, big)
        return rows_idx, esc.reshape(len(rows_idx), width)

    labels = np.zeros((height, width), dtype=np.int8)
    for rows_idx, esc in _run_chunked(work, chunks, threads):
        labels[rows_idx] = np.where(esc >= 0, LABEL_ESCAPE, LABEL_BOUNDED)
    return ImageGrid(width, height, center, hw, hh, labels, "fiber",
                     grid.legend, grid.params)


def render_parameter_plane(window=((-0.75 + 0j), 1.75, 1.25), resolution=400,
                           max_iter=500, threads=1):
    """Quadratic-family classification per pixel: Mandelbrot membership of a
    drives the Fatou topology verdict."""
    center, hw, hh = complex(window[0]), float(window[1]), float(window[2])
    if isinstance(resolution, int):
        width = height = resolution
    else:
        width, height = resolution
    grid = ImageGrid(width, height, center, hw, hh,
                     np.zeros((height, width), dtype=np.int8), "parameter",
                     {str(MANDEL_INSIDE): "ball-basins",
                      str(MANDEL_OUTSIDE): "infinitely-generated-vertical-basin"},
                     {"family": "quadratic", "max_iter": max_iter})
    pts = grid.grid_points()
    chunks = np.array_split(np.arange(height), max(1, min(threads * 4, height)))

    def work(rows_idx):
        esc = kernels.mandelbrot_grid(pts[rows_idx].ravel(), max_iter)
        return rows_idx, esc.reshape(len(rows_idx), width)

    labels = np.zeros((height, width), dtype=np.int8)
    for rows_idx, esc in _run_chunked(work, chunks, threads):
        labels[rows_idx] = np.where(esc >= 0, MANDEL_OUTSIDE, MANDEL_INSIDE)
    return ImageGrid(width, height, center, hw, hh, labels, "parameter",
                     grid.legend, grid.params)


@dataclass(frozen=True)
class ComponentCount:
    interior: int
    boundary_touching: int


def count_components(grid, label):
    """4-connectivity flood-fill count of maximal `label` regions; regions
    touching the window boundary are excluded from `interior` and reported
    separately (truncated regions are not components)."""
    mask = grid.pixels == label
    H, W = mask.shape
    seen = np.zeros_like(mask)
    interior = boundary = 0
    for i in range(H):
        for j in range(W):
            if mask[i, j] and not seen[i, j]:
                touches = False
                dq = deque([(i, j)])
                seen[i, j] = True
                while dq:
                    a, b = dq.popleft()
                    if a in (0, H - 1) or b in (0, W - 1):
                        touches = True
                    for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        x, y = a + da, b + db
                        if 0 <= x < H and 0 <= y < W and mask[x, y] and not seen[x, y]:
                            seen[x, y] = True
                            dq.append((x, y))
                if touches:
                    boundary += 1
                else:
                    interior += 1
    return ComponentCount(interior, boundary)


def write_ppm(grid, path):
    """Binary PPM (P6) with the fixed palette, plus a JSON sidecar at
    path + '.json'."""
    palette = grid.legend_palette()
    H, W = grid.pixels.shape
    rgb = np.zeros((H, W, 3), dtype=np.uint8)
    for label, color in palette.items():
        rgb[grid.pixels == label] = color
    with open(path, "wb") as fh:
        fh.write(f"P6\n{W} {H}\n255\n".encode())
        fh.write(rgb.tobytes())
    with open(str(path) + ".json", "w") as fh:
        json.dump(grid.sidecar(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return os.path.abspath(path)
