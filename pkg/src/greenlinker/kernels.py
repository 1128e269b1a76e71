"""Backend selection for the hot grid kernels.

The compiled extension (greenlinker._kernels, Cython) is preferred; the
numpy fallback (greenlinker._kernels_py) is used when the extension is not
built or when GREENLINKER_PURE=1 is set.  `benchmarks/bench_kernels.py`
compares the two.
"""

import os

from . import _kernels_py

if os.environ.get("GREENLINKER_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
fiber_green_grid = _impl.fiber_green_grid
mandelbrot_grid = _impl.mandelbrot_grid


def available_backends():
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
