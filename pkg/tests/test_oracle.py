import numpy as np
import pytest

from greenlinker.errors import ValidationError
from greenlinker.linking import Mod1Rational, circle_loop, point_loop
from greenlinker.maps import FIG2_FIBER, example_03, fig2_loop
from greenlinker.numerics import Poly1
from greenlinker.oracle import (
    brolin_sample,
    brolin_sample_fiber,
    estimate_enclosed_mass,
    snap_to_dyadic,
)


class TestBrolinSample:
    def test_square_equidistributes_on_circle(self):
        m = brolin_sample(Poly1([0, 0, 1]), 4.0, depth=20, count=5000, seed=1)
        assert np.max(np.abs(np.abs(m.points) - 1.0)) < 1e-3

    def test_balanced_halves(self):
        m = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=24, count=50_000, seed=3)
        frac = float(np.mean(m.points.real > 0))
        sigma = np.sqrt(0.25 / m.count)
        assert abs(frac - 0.5) <= 3 * sigma

    def test_branch_masses_match_circle(self):
        # each level-1 branch (upper/lower lobe) carries mass 1/2
        m = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=24, count=50_000, seed=8)
        est = estimate_enclosed_mass(m, circle_loop(1.0305j, 0.75))
        assert abs(est.estimate - 0.5) <= 3 * est.stderr

    def test_seed_determinism(self):
        a = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=12, count=500, seed=42)
        b = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=12, count=500, seed=42)
        assert np.array_equal(a.points, b.points)
        c = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=12, count=500, seed=43)
        assert not np.array_equal(a.points, c.points)

    def test_exceptional_basepoint_rejected(self):
        with pytest.raises(ValidationError):
            brolin_sample(Poly1([0, 0, 1]), 1.0)

    def test_pushforward_consistency(self):
        # applying g to depth-n samples matches depth-(n-1) enclosed mass
        g = Poly1([1, 0, 1])
        deep = brolin_sample(g, 8.0, depth=20, count=40_000, seed=5)
        shallow = brolin_sample(g, 8.0, depth=19, count=40_000, seed=6)
        loop = circle_loop(0.53 + 0.61j, 0.75)
        pushed = type(deep)(g.eval(deep.points), deep.seed, deep.depth, deep.count)
        e1 = estimate_enclosed_mass(pushed, loop)
        e2 = estimate_enclosed_mass(shallow, loop)
        assert abs(e1.estimate - e2.estimate) <= 3 * (e1.stderr + e2.stderr)


class TestFiberSampling:
    def test_quarter_mass(self):
        f = example_03()
        m = brolin_sample_fiber(f, FIG2_FIBER, depth=24, count=30_000, seed=11)
        est = estimate_enclosed_mass(m, fig2_loop())
        assert est.stderr < 0.01
        assert abs(est.estimate - 0.25) <= 3 * est.stderr

    def test_agreement_with_exact_linking(self):
        from greenlinker.linking import linking_fiber
        from greenlinker.skewdyn import fiber_context
        f = example_03()
        ctx = fiber_context(f, FIG2_FIBER, 260)
        m = brolin_sample_fiber(f, FIG2_FIBER, depth=24, count=30_000, seed=12)
        for loop in (fig2_loop(), circle_loop(0, 3.0, "fiber", FIG2_FIBER)):
            lk, _ = linking_fiber(f, ctx, loop)
            est = estimate_enclosed_mass(m, loop)
            exact = lk.num / lk.den
            # mod-1: the all-enclosing loop has lk 0 but mass 1
            err = min(abs(est.estimate - exact), abs(est.estimate - exact - 1))
            assert err <= 3 * max(est.stderr, 1e-4)


class TestEnclosedMass:
    def test_all_enclosing_exact_one(self):
        m = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=18, count=2000, seed=9)
        est = estimate_enclosed_mass(m, circle_loop(0, 3.0))
        assert est.estimate == 1.0 and est.stderr == pytest.approx(0.0, abs=1e-12)

    def test_point_loop_zero(self):
        m = brolin_sample(Poly1([1, 0, 1]), 8.0, depth=18, count=2000, seed=9)
        est = estimate_enclosed_mass(m, point_loop(0.3))
        assert est.estimate == 0.0


class TestSnapToDyadic:
    def test_quarter(self):
        assert snap_to_dyadic(0.2497, 0.0015, 2, 8) == Mod1Rational(1, 4)

    def test_no_candidate_in_band(self):
        assert snap_to_dyadic(0.3330, 0.0015, 2, 3) is None

    def test_half_not_in_powers_of_three(self):
        assert snap_to_dyadic(0.5002, 0.0009, 3, 6) is None
