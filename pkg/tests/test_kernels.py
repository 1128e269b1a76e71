"""Compiled kernel vs pure-numpy fallback equivalence."""

import numpy as np
import pytest

from greenlinker import kernels, orbits
from greenlinker.maps import example_03, example_jonsson
from greenlinker.skewdyn import fiber_context

backends = kernels.available_backends()
needs_both = pytest.mark.skipif(
    "cython" not in backends, reason="compiled kernel not built"
)


def _random_spec(rng):
    f = example_03() if rng.random() < 0.5 else example_jonsson()
    z0 = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0))
    return fiber_context(f, z0, 80).spec


@needs_both
def test_fiber_green_grid_equivalence():
    rng = np.random.default_rng(100)
    for _ in range(6):
        spec = _random_spec(rng)
        w = (rng.uniform(-4, 4, size=500) + 1j * rng.uniform(-4, 4, size=500))
        big = orbits.big_modulus(spec.d)
        n = spec.certified_steps
        v1, e1, m1 = backends["python"].fiber_green_grid(
            spec.coeff_rows[:n], spec.thresh[:n], w, big)
        v2, e2, m2 = backends["cython"].fiber_green_grid(
            spec.coeff_rows[:n], spec.thresh[:n], w, big)
        assert np.array_equal(e1, e2)
        assert np.array_equal(m1, m2)
        assert np.allclose(v1, v2, rtol=1e-13, atol=1e-300)


@needs_both
def test_mandelbrot_grid_equivalence():
    rng = np.random.default_rng(7)
    c = rng.uniform(-2.5, 1.5, size=4000) + 1j * rng.uniform(-1.5, 1.5, size=4000)
    a = backends["python"].mandelbrot_grid(c, 300)
    b = backends["cython"].mandelbrot_grid(c, 300)
    assert np.array_equal(a, b)


def test_escape_steps_sane():
    spec = fiber_context(example_03(), 0.99999, 80).spec
    w = np.array([5.0 + 0j, 0.0 + 0j, 0.585 + 0.7275j])
    big = orbits.big_modulus(spec.d)
    v, e, m = kernels.fiber_green_grid(spec.coeff_rows, spec.thresh, w, big)
    assert e[0] == 0          # already outside threshold
    assert e[1] >= 0          # gap point: escapes eventually
    assert e[2] == -1         # inside a piece of the filled set
    assert v[2] == 0.0
