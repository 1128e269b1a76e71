"""Acceptance suite: each criterion as a callable returning a result record.

Used by `greenlinker selftest` and by tests/test_acceptance.py; every
criterion prints one pass/fail line when run through run_all(verbose=True).
All tolerances are pinned here.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import maps
from .contours import find_separating_loops
from .dynamics1d import critical_report, green_poly
from .errors import GreenlinkerError, Undetermined
from .linking import (
    LinkOpts,
    circle_loop,
    lift_loop,
    linking_at_infinity,
    linking_fiber,
    linking_poly_1d,
    push_forward_loop,
)
from .oracle import brolin_sample_fiber, estimate_enclosed_mass
from .render import count_components, render_fiber
from .sequence import generate_linking_sequence, largest_modulus_preimage
from .skewdyn import classify_quadratic_family, fiber_context, green_affine, green_fiber


@dataclass
class AcceptanceResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def _fiber_pinch_levels(f, z0, count=4):
    """Potentials of the fiber critical point along the base orbit, scaled to
    the starting fiber: the branch levels of the fiber potential."""
    from .skewdyn import fiber_critical_points
    vals = []
    z = complex(z0)
    for k in range(count):
        ctx = fiber_context(f, z, 260)
        for c in fiber_critical_points(f, z):
            g = green_fiber(f, ctx, complex(c))
            if g.certified_positive:
                vals.append(g.value / f.d ** k)
        z = f.p.eval(z)
    return sorted(set(vals), reverse=True)


def criterion_1_quarter_linking(fast=False):
    """Example fiber: a loop around one of the four pieces links 1/4; the
    reversed loop links 3/4.  Single-threaded, < 30 s."""
    f = maps.example_03()
    ctx = fiber_context(f, maps.FIG2_FIBER, 260)
    loop = maps.fig2_loop()
    t0 = time.perf_counter()
    lk, cert = linking_fiber(f, ctx, loop)
    lk_rev, _ = linking_fiber(f, ctx, loop.reversed())
    dt = time.perf_counter() - t0
    ok = (lk.num, lk.den) == (1, 4) and (lk_rev.num, lk_rev.den) == (3, 4) and dt < 30.0
    return ok, (f"lk={lk} (depth {cert.depth}, winding {cert.winding}), "
                f"reversed={lk_rev}, {dt:.1f}s < 30s")


def criterion_2_component_count(fast=False):
    """600x600 fiber render over the default window shows the four pieces."""
    f = maps.example_03()
    grid = render_fiber(f, maps.FIG2_FIBER, window=None, resolution=600, depth=15)
    cc = count_components(grid, 0)
    ok = cc.interior == 4 and cc.boundary_touching == 0
    return ok, (f"interior components = {cc.interior} (want 4), "
                f"boundary-touching = {cc.boundary_touching}")


def _certified_loop_battery(fast=False):
    """(map, fiber, loop, lk) spread across three built-in maps: separating
    loops, randomly jittered copies, and random certified circles."""
    rng = np.random.default_rng(20260809)
    battery = []
    cases = [
        (maps.example_03(), maps.FIG2_FIBER),
        (maps.example_jonsson(), -2.0),
        (maps.quadratic(1.0), 1.0),
    ]
    for f, z0 in cases:
        ctx = fiber_context(f, z0, 260)
        levels = _fiber_pinch_levels(f, z0)
        level = (float(np.sqrt(levels[1] * levels[2])) if len(levels) >= 3
                 else 0.5 * levels[0])
        from .render import default_fiber_window
        window = default_fiber_window(f, z0)
        found = find_separating_loops(f, level, window,
                                      resolution=300 if fast else 500, fiber=z0)
        keep = found[:3] if fast else found[:4]
        for lp, lk, _ in keep:
            battery.append((f, z0, lp, lk))
            jitter = 1.0 + float(rng.uniform(-8e-4, 8e-4))
            lj = lp.scaled_about(lp.centroid(), jitter)
            try:
                lkj, _ = linking_fiber(f, ctx, lj)
            except Undetermined:
                continue
            battery.append((f, z0, lj, lkj))
        # random certified circles (mostly null or all-enclosing)
        added = 0
        while added < (3 if fast else 4):
            center = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            radius = float(rng.uniform(0.05, 4.0))
            lp = circle_loop(center, radius, ambient="fiber", fiber_base=z0)
            try:
                lk, _ = linking_fiber(f, ctx, lp)
            except GreenlinkerError:
                continue
            battery.append((f, z0, lp, lk))
            added += 1
    return battery


_BATTERY_CACHE = {}


def _battery(fast):
    if fast not in _BATTERY_CACHE:
        _BATTERY_CACHE[fast] = _certified_loop_battery(fast)
    return _BATTERY_CACHE[fast]


def criterion_3_pushforward_law(fast=False):
    """lk(f . gamma) = d * lk(gamma) mod 1, exactly, across the battery."""
    battery = _battery(fast)
    checked = 0
    nonzero = 0
    for f, z0, lp, lk in battery:
        image = push_forward_loop(f, lp)
        ctx_img = fiber_context(f, f.p.eval(complex(z0)), 260)
        lk_img, _ = linking_fiber(f, ctx_img, image)
        if lk_img != lk.times(f.d):
            return False, (f"pushforward law failed: map fiber {z0}, "
                           f"lk={lk}, image lk={lk_img} != {lk.times(f.d)}")
        checked += 1
        nonzero += 0 if lk.is_zero else 1
    ok = checked >= 20 and nonzero >= 6
    return ok, f"{checked} certified loops across 3 maps ({nonzero} with lk != 0), law exact"


def criterion_4_lift_law(fast=False):
    """Every lift bundle: sum k_i = d and d*lk(L_i) = k_i*lk(gamma) mod 1."""
    battery = _battery(fast)
    bundles = 0
    elements = 0
    for f, z0, lp, lk in battery:
        if lk.is_zero:
            continue
        z1 = largest_modulus_preimage(f.p, complex(z0))
        try:
            bundle = lift_loop(f, z1, lp)
        except Undetermined:
            lp = lp.scaled_about(lp.centroid(), 1 + 1e-6)
            bundle = lift_loop(f, z1, lp)
            lk, _ = linking_fiber(f, fiber_context(f, complex(z0), 260), lp)
        if sum(bundle.degrees) != f.d:
            return False, f"degree sum {sum(bundle.degrees)} != {f.d}"
        ctx1 = fiber_context(f, z1, 260)
        for L, k in zip(bundle.lifts, bundle.degrees):
            lk_l, _ = linking_fiber(f, ctx1, L)
            if lk_l.times(f.d) != lk.times(k):
                return False, (f"pairing identity failed: d*{lk_l} != {k}*{lk} "
                               f"(fiber {z0})")
            elements += 1
        bundles += 1
    return bundles >= 3, f"{bundles} bundles / {elements} lifted loops, identities exact"


def criterion_5_sequence_contraction(fast=False):
    """8-step sequence: masses <= (1/2)^n * mass_0, denominators divide
    2^(n+2), values pairwise distinct and -> 0.  < 5 min."""
    f = maps.example_03()
    steps = 4 if fast else 8
    t0 = time.perf_counter()
    seq = generate_linking_sequence(f, maps.FIG2_FIBER, maps.fig2_loop(), steps)
    dt = time.perf_counter() - t0
    if len(seq) != steps + 1:
        return False, f"sequence truncated at {len(seq) - 1} of {steps} steps"
    m0 = seq[0].mass
    for n, s in enumerate(seq):
        if s.mass > m0 * Fraction(1, 2) ** n:
            return False, f"contraction violated at step {n}: {s.mass}"
        if (2 ** (n + 2)) % s.lk.den != 0:
            return False, f"denominator {s.lk.den} does not divide 2^{n + 2}"
    values = [(s.lk.num, s.lk.den) for s in seq]
    if len(set(values)) != len(values):
        return False, "linking values not pairwise distinct"
    ok = dt < 300.0
    tail = seq[-1]
    return ok, (f"{steps} steps, masses {seq[0].mass} -> {tail.mass}, "
                f"lk values distinct, {dt:.0f}s < 300s")


def criterion_6_oracle_agreement(fast=False):
    """Monte-Carlo mass of the quarter loop: within 3 sigma of 1/4 at 1e5
    samples, sigma < 0.01."""
    f = maps.example_03()
    count = 20_000 if fast else 100_000
    m = brolin_sample_fiber(f, maps.FIG2_FIBER, depth=24, count=count, seed=2026)
    est = estimate_enclosed_mass(m, maps.fig2_loop())
    ok = abs(est.estimate - 0.25) <= 3 * est.stderr and est.stderr < 0.01
    return ok, (f"estimate {est.estimate:.4f} +/- {est.stderr:.4f} "
                f"(|err| = {abs(est.estimate - 0.25):.4f} <= 3 sigma)")


def criterion_7_quadratic_classification(fast=False):
    """Thm-6.3 verdicts at six parameters with known Mandelbrot membership."""
    inside = [0.0, -1.0, 0.5j]
    outside = [0.3, 1.0, -2.1]
    for a in inside:
        if classify_quadratic_family(a) != "ball-basins":
            return False, f"a={a}: expected ball-basins"
    for a in outside:
        if classify_quadratic_family(a) != "infinitely-generated-vertical-basin":
            return False, f"a={a}: expected infinitely-generated-vertical-basin"
    return True, "a in {0, -1, 0.5i} -> ball-basins; {0.3, 1, -2.1} -> infinitely generated"


def criterion_8_rabbit(fast=False):
    """Cubic with one escaping critical point and one period-3 cycle; exact
    linking at infinity lands in Z[1/3]/Z."""
    r = maps.rabbit_poly()
    rep = critical_report(r, max_iter=3000)
    esc = [e for e in rep.entries if e.escaped]
    bnd = [e for e in rep.entries if not e.escaped]
    if len(esc) != 1 or len(bnd) != 1 or bnd[0].period != 3:
        return False, f"critical classification wrong: {rep.as_dict()}"
    endo = maps.rabbit_endo()
    g0 = max(e.green.value for e in esc)
    found = find_separating_loops(r, 0.5 * g0, (0j, 2.0, 2.0),
                                  resolution=300 if fast else 400)
    sep = [(lp, lk) for lp, lk, _ in found if not lk.is_zero]
    if not sep:
        return False, "no separating loop found for the cubic"
    lp, lk_plain = sep[0]
    (lk, cert), rest = linking_at_infinity(endo, lp)
    is_power_of_3 = lk.den > 1 and 3 ** 40 % lk.den == 0
    (lk_all, _), _ = linking_at_infinity(endo, circle_loop(0, 6.0))
    ok = (not lk.is_zero) and is_power_of_3 and lk_all.is_zero and lk == lk_plain
    return ok, (f"one escaping + one period-3 critical point; separating loop "
                f"lk = {lk} in Z[1/3]/Z, all-enclosing lk = {lk_all}")


def criterion_9_functional_equations(fast=False):
    """G(p(z)) = d G(z) and G_affine(f(z,w)) = d G_affine(z,w) within the
    certified bounds, 100 random points per built-in map."""
    rng = np.random.default_rng(987)
    n_pts = 25 if fast else 100
    skews = [maps.example_03(), maps.example_jonsson(), maps.example_cantor_pi(),
             maps.quadratic(-1.0)]
    slack = 1e-9
    for f in skews:
        d = f.d
        for _ in range(n_pts):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            w = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            g1 = green_affine(f, z, w)
            z2, w2 = f.apply(z, w)
            g2 = green_affine(f, z2, w2)
            tol = d * g1.bound.value + g2.bound.value + slack
            if abs(g2.value - d * g1.value) > tol:
                return False, (f"affine functional equation failed at ({z:.3f},{w:.3f}): "
                               f"{g2.value} vs {d * g1.value} (tol {tol:.2g})")
    one_d = [maps.example_03().p, maps.example_jonsson().p, maps.rabbit_poly()]
    for p in one_d:
        d = p.degree
        for _ in range(n_pts):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            g1 = green_poly(p, z)
            g2 = green_poly(p, p.eval(z))
            tol = d * g1.bound.value + g2.bound.value + slack
            if abs(g2.value - d * g1.value) > tol:
                return False, (f"base functional equation failed at {z:.3f}: "
                               f"{g2.value} vs {d * g1.value}")
    return True, f"{n_pts} random points per map, both equations within certified bounds"


def criterion_10_exactness_stability(fast=False):
    """Doubling sampling resolution and incrementing certification depth
    reproduces identical reduced rationals on the suite's loops."""
    battery = _battery(fast)
    probe = [(f, z0, lp, lk) for f, z0, lp, lk in battery][:8]
    f0 = maps.example_03()
    probe.append((f0, maps.FIG2_FIBER, maps.fig2_loop(), None))
    checked = 0
    for f, z0, lp, lk in probe:
        ctx = fiber_context(f, complex(z0), 260)
        base, _ = linking_fiber(f, ctx, lp)
        harder = LinkOpts(initial_samples=512, extra_depth=1)
        again, _ = linking_fiber(f, ctx, lp, harder)
        if base != again:
            return False, f"result changed under refinement: {base} -> {again}"
        if lk is not None and base != lk:
            return False, f"result changed between runs: {lk} -> {base}"
        checked += 1
    r = maps.rabbit_poly()
    found = find_separating_loops(r, 0.01, (0j, 2.0, 2.0), resolution=300)
    for lp, lk, _ in found[:2]:
        a, _ = linking_poly_1d(r, lp)
        b, _ = linking_poly_1d(r, lp, LinkOpts(initial_samples=512, extra_depth=1))
        if a != b or a != lk:
            return False, f"1-d result changed under refinement: {lk}, {a}, {b}"
        checked += 1
    return True, f"{checked} linking results invariant under doubled resolution / deeper depth"


CRITERIA = [
    ("1 quarter-linking worked example", criterion_1_quarter_linking),
    ("2 figure component count", criterion_2_component_count),
    ("3 pushforward law", criterion_3_pushforward_law),
    ("4 lift law", criterion_4_lift_law),
    ("5 sequence contraction", criterion_5_sequence_contraction),
    ("6 oracle agreement", criterion_6_oracle_agreement),
    ("7 quadratic-family classification", criterion_7_quadratic_classification),
    ("8 cubic at infinity", criterion_8_rabbit),
    ("9 potential functional equations", criterion_9_functional_equations),
    ("10 exactness stability", criterion_10_exactness_stability),
]


def run_all(verbose=False, fast=False, stream=None):
    results = []
    for name, fn in CRITERIA:
        t0 = time.perf_counter()
        try:
            passed, detail = fn(fast=fast)
        except Exception as exc:  # noqa: BLE001 - acceptance must report, not die
            passed, detail = False, f"exception: {type(exc).__name__}: {exc}"
        dt = time.perf_counter() - t0
        results.append(AcceptanceResult(name, passed, detail, dt))
        if verbose:
            status = "PASS" if passed else "FAIL"
            print(f"[{status}] criterion {name}: {detail} ({dt:.1f}s)", file=stream)
    return results
