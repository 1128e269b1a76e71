import numpy as np
import pytest

from greenlinker.errors import ValidationError
from greenlinker.maps import (
    example_03,
    example_jonsson,
    product_squares,
    quadratic,
)
from greenlinker.numerics import Poly1, Poly2W
from greenlinker.skewdyn import (
    SkewProduct,
    classify_quadratic_family,
    connectivity_certificate,
    dehomogenize,
    fiber_context,
    fiber_critical_points,
    green_affine,
    green_fiber,
    homogenize,
)


class TestGreenAffine:
    def test_product_map_sup_norm(self):
        f = product_squares()
        g = green_affine(f, 2.0, 1.0)
        assert g.value == pytest.approx(np.log(2), abs=1e-14)

    def test_fixed_point(self):
        f = example_03()
        g = green_affine(f, 0.0, 0.0)
        assert g.value == 0.0 and not g.escaped

    def test_self_consistency(self):
        f = example_03()
        g30 = green_affine(f, 0.99999, 3.0, target_err=0, max_depth=30)
        g60 = green_affine(f, 0.99999, 3.0, target_err=0, max_depth=60)
        assert abs(g30.value - g60.value) <= g30.bound.value + g60.bound.value + 1e-15

    def test_functional_equation(self):
        rng = np.random.default_rng(11)
        for f in (example_03(), example_jonsson(), quadratic(-1)):
            for _ in range(40):
                z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                w = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                g1 = green_affine(f, z, w)
                g2 = green_affine(f, *f.apply(z, w))
                tol = f.d * g1.bound.value + g2.bound.value + 1e-9
                assert abs(g2.value - f.d * g1.value) <= tol


class TestGreenFiber:
    def test_product_is_log_plus_over_filled_base(self):
        # G_z(w) = G_affine - G_p = log+|w| wherever the base orbit is bounded
        f = product_squares()
        for z in (0.0, 0.5, np.exp(0.7j)):
            ctx = fiber_context(f, z)
            g = green_fiber(f, ctx, 3.0)
            assert g.value == pytest.approx(np.log(3), abs=1e-12)

    def test_product_escaping_base_subtracts_base_rate(self):
        # over an escaping base point the fiber potential is V - G_p
        f = product_squares()
        ctx = fiber_context(f, 2.0)
        g = green_fiber(f, ctx, 3.0)
        assert g.value == pytest.approx(np.log(3) - np.log(2), abs=1e-12)

    def test_positive_on_escaping_point(self):
        f = example_03()
        ctx = fiber_context(f, 0.99999)
        g = green_fiber(f, ctx, 0.1)  # real-axis gap of the four pieces
        assert g.certified_positive

    def test_zero_on_bounded(self):
        f = example_03()
        ctx = fiber_context(f, 0.99999)
        g = green_fiber(f, ctx, 0.585 + 0.7275j)  # interior of the filled set
        assert g.value == 0.0 and g.bound.valid

    def test_decomposition_matches_affine(self):
        f = example_jonsson()
        rng = np.random.default_rng(4)
        from greenlinker.dynamics1d import green_poly
        for _ in range(40):
            z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            w = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            ctx = fiber_context(f, z)
            gz = green_fiber(f, ctx, w)
            ga = green_affine(f, z, w)
            gp = green_poly(f.p, z)
            lhs = gz.value
            rhs = ga.value - gp.value
            tol = gz.bound.value + ga.bound.value + gp.bound.value + 1e-10
            if gz.escaped:
                assert abs(lhs - rhs) <= tol


class TestFiberCriticalPoints:
    def test_quadratic_family(self):
        f = quadratic(0.7)
        assert np.allclose(fiber_critical_points(f, 1.5), [0])

    def test_cubic_fiber(self):
        # (z^3, w^3 + z w): critical points +/- sqrt(-z/3)
        f = SkewProduct(
            Poly1([0, 0, 0, 1]),
            Poly2W([Poly1([0]), Poly1([0, 1]), Poly1([0]), Poly1([1])]),
        )
        crit = sorted(fiber_critical_points(f, -3.0), key=lambda c: c.real)
        assert np.allclose(crit, [-1, 1])

    def test_multiplicity(self):
        f = SkewProduct(
            Poly1([0, 0, 0, 1]),
            Poly2W([Poly1([1]), Poly1([0]), Poly1([0]), Poly1([1])]),  # w^3 + 1
        )
        crit = fiber_critical_points(f, 0.3)
        assert len(crit) == 2
        assert np.all(np.abs(crit) < 1e-4)


class TestConnectivity:
    def test_quadratic_03_disconnected_at_fixed_fiber(self):
        cert = connectivity_certificate(quadratic(0.3), 1.0, depth=10)
        assert cert.verdict == "disconnected"
        assert cert.witness_index == 0
        assert abs(cert.witness_point) < 1e-9
        assert cert.witness_green.certified_positive

    def test_basilica_no_escape(self):
        cert = connectivity_certificate(quadratic(-1.0), 1.0, depth=30)
        assert cert.verdict == "no-escaping-critical-point-through-depth"

    def test_jonsson_disconnected_over_minus2(self):
        cert = connectivity_certificate(example_jonsson(), -2.0, depth=10)
        assert cert.verdict == "disconnected"


class TestClassifyQuadraticFamily:
    @pytest.mark.parametrize("a,label", [
        (0.0, "ball-basins"),
        (1.0, "infinitely-generated-vertical-basin"),
        (0.3, "infinitely-generated-vertical-basin"),
    ])
    def test_examples(self, a, label):
        assert classify_quadratic_family(a) == label

    def test_conjugation_symmetry(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = complex(rng.uniform(-2, 1), rng.uniform(-1.5, 1.5))
            assert classify_quadratic_family(a) == classify_quadratic_family(np.conj(a))


class TestHomogenize:
    def test_quadratic_family_tables(self):
        endo = homogenize(quadratic(0.5))
        # [Z^2 : W^2 + a Z T : T^2]
        assert endo.P.table[2, 0] == 1
        assert endo.Q.table[0, 2] == 1
        assert endo.Q.table[1, 0] == 0.5

    def test_round_trip(self):
        for f in (example_03(), example_jonsson(), quadratic(1j)):
            g = dehomogenize(homogenize(f))
            assert g.p == f.p
            assert g.q == f.q

    def test_involution_symmetry(self):
        # homogenize(f_a) commutes with S: [Z:W:T] -> [T:W:Z], coefficient-exactly:
        # S o F = [T^d : Q : P] must equal F o S = [P o S : Q o S : Z^d]
        endo = homogenize(quadratic(0.37))
        P, Q = endo.P, endo.Q
        T2 = np.zeros_like(P.table)
        T2[0, 0] = 1.0  # T^d
        Z2 = np.zeros_like(P.table)
        Z2[2, 0] = 1.0  # Z^d
        f_then_s = [T2, Q.table, P.table]
        s_then_f = [P.swap_zt().table, Q.swap_zt().table, Z2]
        for a, b in zip(f_then_s, s_then_f):
            assert np.array_equal(a, b)

    def test_degree_constraint_rejected(self):
        with pytest.raises(ValidationError):
            # w^2 + z^2 w is total degree 3 > 2
            SkewProduct(Poly1([0, 0, 1]),
                        Poly2W([Poly1([0]), Poly1([0, 0, 1]), Poly1([1])]))
