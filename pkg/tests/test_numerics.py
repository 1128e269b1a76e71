import numpy as np
import pytest

from greenlinker.errors import OverflowDetected, ValidationError
from greenlinker.numerics import (
    Poly1,
    Poly2W,
    escape_radius,
    escape_radius_fiberwise,
    roots,
    roots_batched,
    vertical_escape_kappa,
)

RABBIT_C = complex(0.706260, 0.502896)


class TestEval:
    def test_monomial(self):
        assert Poly1([0, 0, 1]).eval(3 + 0j) == 9 + 0j

    def test_rabbit_constant_term(self):
        r = Poly1([RABBIT_C, -0.48, 0, 1])
        assert r.eval(0j) == RABBIT_C

    def test_eval_with_deriv(self):
        p, dp = Poly1([0.3, 0, 1]).eval_with_deriv(1 + 0j)
        assert p == pytest.approx(1.3)
        assert dp == pytest.approx(2.0)

    def test_deriv_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        poly = Poly1(rng.normal(size=6) + 1j * rng.normal(size=6))
        h = 1e-6
        for _ in range(50):
            x = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
            _, dp = poly.eval_with_deriv(x)
            fd = (poly.eval(x + h) - poly.eval(x - h)) / (2 * h)
            fd += (poly.eval(x + 1j * h) - poly.eval(x - 1j * h)) / (2j * h)
            assert abs(dp - fd / 2) <= 1e-6 * max(1.0, abs(dp))

    def test_array_eval(self):
        poly = Poly1([1, 2, 3])
        xs = np.array([0, 1, 1j])
        vals = poly.eval(xs)
        assert np.allclose(vals, [1, 6, 1 + 2j - 3])

    def test_overflow_detected(self):
        with pytest.raises(OverflowDetected):
            Poly1([0, 0, 1]).eval(complex(1e200, 0))

    def test_leading_zero_rejected(self):
        # trailing zeros stripped; all-zero leading after strip is constant
        p = Poly1([2, 1, 0])
        assert p.degree == 1


class TestRoots:
    def test_pm_one(self):
        r = sorted(roots(Poly1([-1, 0, 1])), key=lambda z: z.real)
        assert np.allclose(r, [-1, 1])

    def test_pm_i(self):
        r = sorted(roots(Poly1([1, 0, 1])), key=lambda z: z.imag)
        assert np.allclose(r, [-1j, 1j])

    def test_rabbit_derivative(self):
        # d/dz (z^3 - 0.48 z + c) = 3 z^2 - 0.48
        r = sorted(roots(Poly1([-0.48, 0, 3])), key=lambda z: z.real)
        assert np.allclose(r, [-np.sqrt(0.16), np.sqrt(0.16)])

    def test_residual_certificate(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            c = rng.normal(size=n) + 1j * rng.normal(size=n)
            poly = Poly1(np.append(c, 1.0))
            tol = 1e-11
            for root in roots(poly, tol=tol):
                assert abs(poly.eval(root)) <= tol * np.max(np.abs(poly.coeffs)) * 50

    def test_multiple_root(self):
        r = roots(Poly1([0, 0, 0, 1]))  # w^3
        assert np.all(np.abs(r) < 1e-3)

    def test_batched_matches_scalar(self):
        g = Poly1([1, -0.5, 0, 1])
        targets = np.array([2 + 1j, -3, 0.5j, 10])
        batch = roots_batched(g.coeffs, targets)
        key = lambda z: (round(z.real, 6), round(z.imag, 6))
        for t, row in zip(targets, batch):
            single = roots(Poly1(np.concatenate([g.coeffs[:1] - t, g.coeffs[1:]])))
            assert np.allclose(sorted(row, key=key), sorted(single, key=key), atol=1e-8)


class TestEscapeRadius:
    def test_pure_square(self):
        assert escape_radius(Poly1([0, 0, 1])) == 2.0

    def test_w2_plus_03(self):
        # formula: 2 * (1 + 0.3)
        assert escape_radius(Poly1([0.3, 0, 1])) == pytest.approx(2.6)

    def test_fiberwise(self):
        q = Poly2W([Poly1([0, 0.3]), Poly1([0]), Poly1([1])])  # w^2 + 0.3 z
        assert escape_radius_fiberwise(q, 1.0) == pytest.approx(2.6)

    def test_growth_property_on_circle(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            coeffs = np.append(rng.normal(size=rng.integers(2, 6)), 1.0)
            poly = Poly1(coeffs)
            R = escape_radius(poly)
            radii = rng.uniform(R, 2 * R, size=100)
            angles = rng.uniform(0, 2 * np.pi, size=100)
            xs = radii * np.exp(1j * angles)
            vals = poly.eval(xs)
            assert np.all(np.abs(vals) >= 2 * np.abs(xs) - 1e-9)
            assert np.all(np.abs(vals) >= np.abs(xs) ** poly.degree / 2 - 1e-9)
            assert np.all(np.abs(vals) <= 2 * np.abs(xs) ** poly.degree + 1e-9)

    def test_non_monic_rejected(self):
        with pytest.raises(ValidationError):
            escape_radius(Poly1([0, 0, 2]))


class TestPoly2W:
    def test_monic_required(self):
        with pytest.raises(ValidationError):
            Poly2W([Poly1([0]), Poly1([0]), Poly1([2])])

    def test_fiber_poly(self):
        q = Poly2W([Poly1([0, 0.3]), Poly1([0]), Poly1([1])])
        qz = q.fiber_poly(2.0)
        assert np.allclose(qz.coeffs, [0.6, 0, 1])

    def test_coeff_rows(self):
        q = Poly2W([Poly1([0, 0.3]), Poly1([0]), Poly1([1])])
        rows = q.coeff_rows([1.0, 2.0])
        assert rows.shape == (2, 3)
        assert rows[1, 0] == 0.6

    def test_kappa_dominance_constant(self):
        p = Poly1([0, 0, 1])
        q = Poly2W([Poly1([0, 0.3]), Poly1([0]), Poly1([1])])
        k = vertical_escape_kappa(p, q)
        assert k == pytest.approx(4.0)  # max(4, 2*(1+0.3), 2)
