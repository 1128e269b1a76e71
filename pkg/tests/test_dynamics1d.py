import numpy as np
import pytest

from greenlinker.dynamics1d import (
    critical_report,
    green_poly,
    mandelbrot_member,
    restriction_at_infinity,
)
from greenlinker.errors import ValidationError
from greenlinker.maps import example_03, rabbit_endo, rabbit_poly
from greenlinker.numerics import Poly1
from greenlinker.skewdyn import HomogPoly3, PolyEndo2, homogenize


class TestGreenPoly:
    def test_square_log2_exact(self):
        g = green_poly(Poly1([0, 0, 1]), 2.0)
        assert g.escaped
        assert g.value == pytest.approx(np.log(2), abs=1e-15)
        assert g.bound.value == 0.0  # pure power: per-step ratio is exactly 0

    def test_square_bounded(self):
        g = green_poly(Poly1([0, 0, 1]), 0.5)
        assert not g.escaped
        assert g.value == 0.0
        assert g.bound.valid and g.bound.value < 1e-10

    def test_self_consistency_two_depths(self):
        p = Poly1([0.3, 0, 1])
        g30 = green_poly(p, 0.0, target_err=0, max_depth=30)
        g60 = green_poly(p, 0.0, target_err=0, max_depth=60)
        assert g30.escaped and g60.escaped
        assert abs(g30.value - g60.value) <= g30.bound.value + g60.bound.value + 1e-15
        assert g30.value > 0

    def test_functional_equation_random(self):
        rng = np.random.default_rng(5)
        p = Poly1([complex(0.1, -0.2), 0, 1])
        for _ in range(60):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            g1 = green_poly(p, z)
            g2 = green_poly(p, p.eval(z))
            tol = 2 * g1.bound.value + g2.bound.value + 1e-12
            assert abs(g2.value - 2 * g1.value) <= tol


class TestCriticalReport:
    def test_rabbit(self):
        rep = critical_report(rabbit_poly(), max_iter=3000)
        escaped = [e for e in rep.entries if e.escaped]
        bounded = [e for e in rep.entries if not e.escaped]
        assert len(escaped) == 1 and len(bounded) == 1
        assert bounded[0].period == 3
        assert escaped[0].green.certified_positive

    def test_pure_square_fixed_critical_point(self):
        rep = critical_report(Poly1([0, 0, 1]), max_iter=500)
        (entry,) = rep.entries
        assert not entry.escaped
        assert entry.period == 1

    def test_z2_plus_1_escapes(self):
        rep = critical_report(Poly1([1, 0, 1]), max_iter=500)
        (entry,) = rep.entries
        assert entry.escaped

    def test_escape_flag_iff_certified_green(self):
        for c in (0.2, 0.26, -1.0, 1j, 0.3 + 0.4j):
            rep = critical_report(Poly1([c, 0, 1]), max_iter=1000)
            for e in rep.entries:
                assert e.escaped == e.green.certified_positive


class TestMandelbrot:
    @pytest.mark.parametrize("a,expected", [(0, "inside"), (-1, "inside"), (0.3, "outside")])
    def test_known_points(self, a, expected):
        verdict, _ = mandelbrot_member(a)
        assert verdict == expected

    def test_matches_critical_report(self):
        for a in (0.1, -0.5, 0.5j, -1.2, 0.4, 1.0, -2.05):
            verdict, _ = mandelbrot_member(a, max_iter=1500)
            rep = critical_report(Poly1([a, 0, 1]), max_iter=1500)
            bounded = not rep.entries[0].escaped
            assert (verdict == "inside") == bounded


class TestRestrictionAtInfinity:
    def test_rabbit_endo(self):
        rest = restriction_at_infinity(rabbit_endo())
        assert rest.is_polynomial and rest.chart == "Z/W"
        assert rest.poly == rabbit_poly()

    def test_skew_product_pure_power(self):
        rest = restriction_at_infinity(homogenize(example_03()))
        assert rest.is_polynomial
        assert np.allclose(rest.poly.coeffs, [0, 0, 1])  # zeta^2

    def test_shared_root_rejected(self):
        d = 2
        P = HomogPoly3(d)
        P.table[2, 0] = 1.0            # Z^2
        Q = HomogPoly3(d)
        Q.table[2, 0] = 1.0            # Z^2 as well: shared root [0:1]
        Q.table[0, 0] = 0.0
        with pytest.raises(ValidationError):
            restriction_at_infinity(PolyEndo2(P, Q))
