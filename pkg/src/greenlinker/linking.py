"""Exact mod-1 linking numbers by winding stabilization.

The pairing of a loop in an escaping region with the restricted Green's
current is computed through the argument principle: once the depth-n image
of the loop lies entirely outside the certified escape threshold, each
further iteration multiplies the winding number about the origin by exactly
the degree, so W_n / d^n stabilizes and is the linking number as an exact
rational, reduced mod 1.  No 2-chain and no current regularization is ever
represented; the stabilization check (W_{n+1} = d W_n in integer arithmetic)
plus the pi/2 argument-step guard make up the certificate.

Certification is sampling-based: every adaptive sample must certifiably
escape, and each certificate records the resolution it was verified at.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import orbits
from .dynamics1d import restriction_at_infinity
from .errors import (
    LoopStraddlesJulia,
    PerturbationRequired,
    StabilizationFailure,
    UnsupportedExactMode,
    ValidationError,
)
from .numerics import Poly1, roots
from .skewdyn import FiberContext, SkewProduct, fiber_critical_values

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Loops.

@dataclass(frozen=True)
class ArcSegment:
    center: complex
    radius: float
    from_angle: float
    to_angle: float  # traversal from from_angle to to_angle (signed span)

    def point(self, s):
        ang = self.from_angle + s * (self.to_angle - self.from_angle)
        return self.center + self.radius * complex(math.cos(ang), math.sin(ang))

    @property
    def start(self):
        return self.point(0.0)

    @property
    def end(self):
        return self.point(1.0)

    def reversed(self):
        return ArcSegment(self.center, self.radius, self.to_angle, self.from_angle)

    def as_dict(self):
        return {"type": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "from_angle": self.from_angle,
                "to_angle": self.to_angle}


@dataclass(frozen=True)
class PolylineSegment:
    points: tuple  # complex vertices, consecutive

    def point(self, s):
        pts = self.points
        if len(pts) == 1:
            return pts[0]
        x = s * (len(pts) - 1)
        i = min(int(x), len(pts) - 2)
        t = x - i
        return pts[i] * (1 - t) + pts[i + 1] * t

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def reversed(self):
        return PolylineSegment(tuple(reversed(self.points)))

    def as_dict(self):
        return {"type": "polyline",
                "points": [[p.real, p.imag] for p in self.points]}


@dataclass(frozen=True)
class OrientedLoop:
    """Closed piecewise path in a vertical fiber or in the plane.

    ambient is "plane" for loops in C (one-variable dynamics, charts at
    infinity) or "fiber" with `fiber_base` set for loops in a vertical line.
    Orientation is traversal order; parameter t in [0, 1) spans the segments
    uniformly.
    """

    segments: tuple
    ambient: str = "plane"
    fiber_base: complex | None = None

    def __post_init__(self):
        if self.ambient not in ("plane", "fiber"):
            raise ValidationError("ambient must be 'plane' or 'fiber'")
        if self.ambient == "fiber" and self.fiber_base is None:
            raise ValidationError("fiber loops need fiber_base")
        if not self.segments:
            raise ValidationError("loop needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:] + (self.segments[0],)):
            if abs(a.end - b.start) > 1e-12 * (1 + abs(a.end)):
                raise ValidationError("loop is not closed (segment endpoints mismatch)")

    def point(self, t):
        t = t % 1.0
        m = len(self.segments)
        x = t * m
        i = min(int(x), m - 1)
        return self.segments[i].point(x - i)

    def points(self, ts):
        return np.array([self.point(float(t)) for t in np.atleast_1d(ts)])

    def sample(self, n):
        """n points uniformly in parameter (no endpoint duplication)."""
        return self.points(np.arange(n) / n)

    @property
    def is_point_loop(self):
        pts = self.sample(16)
        return bool(np.all(np.abs(pts - pts[0]) < 1e-15 * (1 + abs(pts[0]))))

    def reversed(self):
        segs = tuple(s.reversed() for s in reversed(self.segments))
        return OrientedLoop(segs, self.ambient, self.fiber_base)

    def scaled_about(self, center, factor):
        segs = []
        for s in self.segments:
            if isinstance(s, ArcSegment):
                segs.append(ArcSegment(center + (s.center - center) * factor,
                                       s.radius * factor, s.from_angle, s.to_angle))
            else:
                segs.append(PolylineSegment(tuple(center + (p - center) * factor
                                                  for p in s.points)))
        return OrientedLoop(tuple(segs), self.ambient, self.fiber_base)

    def centroid(self):
        pts = self.sample(256)
        return complex(np.mean(pts))

    def as_dict(self):
        amb = {"type": self.ambient}
        if self.ambient == "fiber":
            amb["z"] = [self.fiber_base.real, self.fiber_base.imag]
        return {"ambient": amb, "segments": [s.as_dict() for s in self.segments]}


def circle_loop(center, radius, ambient="plane", fiber_base=None, reverse=False):
    to = -TWO_PI if reverse else TWO_PI
    return OrientedLoop((ArcSegment(complex(center), float(radius), 0.0, to),),
                        ambient, fiber_base)


def polyline_loop(points, ambient="plane", fiber_base=None):
    pts = [complex(p) for p in points]
    if abs(pts[0] - pts[-1]) > 1e-12 * (1 + abs(pts[0])):
        pts.append(pts[0])
    return OrientedLoop((PolylineSegment(tuple(pts)),), ambient, fiber_base)


def point_loop(point, ambient="plane", fiber_base=None):
    p = complex(point)
    return OrientedLoop((PolylineSegment((p, p)),), ambient, fiber_base)


def loop_from_dict(obj, default_fiber=None):
    """Parse the external loop schema (see README: loop JSON)."""
    try:
        amb = obj.get("ambient", "plane")
        if isinstance(amb, str):
            ambient, zbase = amb, default_fiber
        else:
            ambient = amb["type"]
            zraw = amb.get("z", None)
            zbase = complex(zraw[0], zraw[1]) if zraw is not None else default_fiber
        segs = []
        for s in obj["segments"]:
            if s["type"] == "arc":
                segs.append(ArcSegment(complex(s["center"][0], s["center"][1]),
                                       float(s["radius"]), float(s["from_angle"]),
                                       float(s["to_angle"])))
            elif s["type"] == "polyline":
                segs.append(PolylineSegment(tuple(complex(p[0], p[1]) for p in s["points"])))
            else:
                raise ValidationError(f"unknown segment type {s['type']!r}")
        return OrientedLoop(tuple(segs), ambient, zbase)
    except (KeyError, IndexError, TypeError) as exc:
        raise ValidationError(f"malformed loop object: {exc}") from exc


# ---------------------------------------------------------------------------
# Exact rationals mod 1.

@dataclass(frozen=True)
class Mod1Rational:
    """Reduced rational in [0, 1) representing an element of Q/Z."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise ValidationError("denominator must be positive")
        fr = Fraction(self.num, self.den) % 1
        object.__setattr__(self, "num", fr.numerator)
        object.__setattr__(self, "den", fr.denominator)

    @classmethod
    def from_fraction(cls, fr):
        fr = Fraction(fr) % 1
        return cls(fr.numerator, fr.denominator)

    def as_fraction(self):
        return Fraction(self.num, self.den)

    def __add__(self, other):
        return Mod1Rational.from_fraction(self.as_fraction() + other.as_fraction())

    def __neg__(self):
        return Mod1Rational.from_fraction(-self.as_fraction())

    def __sub__(self, other):
        return self + (-other)

    def times(self, k):
        return Mod1Rational.from_fraction(k * self.as_fraction())

    @property
    def is_zero(self):
        return self.num == 0

    def as_dict(self):
        return {"num": self.num, "den": self.den}

    def __str__(self):
        return f"{self.num}/{self.den}"


@dataclass(frozen=True)
class WindingCertificate:
    depth: int
    winding: int
    stabilization_checked: bool
    min_image_modulus: float
    samples: int
    reason: str | None = None  # set for degenerate 0 results

    def as_dict(self):
        return {
            "depth": self.depth,
            "winding": self.winding,
            "stabilization_checked": self.stabilization_checked,
            "min_image_modulus": self.min_image_modulus,
            "samples": self.samples,
            **({"reason": self.reason} if self.reason else {}),
        }


@dataclass(frozen=True)
class LinkOpts:
    initial_samples: int = 256
    max_samples: int = 1 << 20
    max_depth: int = 200
    extra_depth: int = 0          # certify at depth n* + extra_depth
    margin: float = 1e-8          # critical-value clearance for lifting
    collision_tol: float = 1e-9


# ---------------------------------------------------------------------------
# The winding tracker.

class _Tracker:
    """Vectorized orbit state for loop samples: complex until the modulus
    passes the overflow guard, log-polar afterwards.  In the log-polar regime
    the neglected coefficient influence is below double precision, so the
    argument update theta -> d*theta (mod 2 pi) is exact for our purposes."""

    def __init__(self, spec):
        self.spec = spec
        self.big = orbits.big_modulus(spec.d)

    def run(self, w0, depth):
        """Iterate samples `depth` steps; return (logmod, theta, esc_step).

        esc_step[i] = first time the sample crossed its step threshold
        (certified escape), or -1.
        """
        spec = self.spec
        if depth > spec.certified_steps:
            raise ValidationError(
                "depth exceeds the certified range of the orbit specification "
                "(base orbit escaped the trackable region or spec too shallow)"
            )
        w = np.asarray(w0, dtype=complex).copy()
        n_pts = w.size
        switched = np.zeros(n_pts, dtype=bool)
        logm = np.zeros(n_pts)
        theta = np.zeros(n_pts)
        esc = np.full(n_pts, -1, dtype=np.int64)
        for n in range(depth):
            a = np.where(switched, np.inf, np.abs(w))
            newly = (esc < 0) & (np.where(switched, True, a > spec.thresh[n]))
            esc[newly] = n
            # move huge samples to log-polar before the advance would overflow
            move = ~switched & (np.abs(w) > self.big)
            if move.any():
                logm[move] = np.log(np.abs(w[move]))
                theta[move] = np.angle(w[move])
                switched |= move
            live = ~switched
            if live.any():
                w[live] = orbits.advance(spec, w[live], n)
            if switched.any():
                logm[switched] *= spec.d
                theta[switched] = np.mod(spec.d * theta[switched], TWO_PI)
        out_log = np.where(switched, logm, np.log(np.maximum(np.abs(w), 1e-300)))
        out_th = np.where(switched, theta, np.angle(w))
        return out_log, out_th, esc


def _winding_from_theta(theta, guard):
    """Integer winding from per-sample arguments of a closed sampled loop.

    Returns (winding, max_step) or (None, max_step) when a consecutive
    argument step reaches `guard` (needs refinement)."""
    d = np.diff(np.concatenate([theta, theta[:1]]))
    d = (d + np.pi) % TWO_PI - np.pi
    mx = float(np.max(np.abs(d))) if d.size else 0.0
    if mx >= guard:
        return None, mx
    total = float(np.sum(d)) / TWO_PI
    w = round(total)
    if abs(total - w) > 0.25:
        return None, mx
    return w, mx


def _link_by_winding(spec, loop, opts):
    """Core routine: exact W/d^n mod 1 for a loop of fiber/plane samples."""
    tracker = _Tracker(spec)
    m = len(loop.segments)
    n0 = max(opts.initial_samples, 8 * m)
    ts = np.arange(n0) / n0

    if loop.is_point_loop:
        return (Mod1Rational(0, 1),
                WindingCertificate(0, 0, True, float("inf"), 1, reason="point loop"))

    pts = loop.points(ts)
    # find the first depth where every sample has certifiably escaped
    depth_cap = min(opts.max_depth, spec.certified_steps - 1 - opts.extra_depth)
    esc_full = tracker.run(pts, depth_cap)[2]
    if np.all(esc_full < 0):
        return (Mod1Rational(0, 1),
                WindingCertificate(depth_cap, 0, True, 0.0, len(ts),
                                   reason="null-homologous in bounded component"))
    if np.any(esc_full < 0):
        bad = int(np.argmax(esc_full < 0))
        raise LoopStraddlesJulia(
            f"loop sample at t={ts[bad]:.6f} did not escape within depth {depth_cap}: "
            "the loop touches or straddles the Julia set at this resolution",
            t=float(ts[bad]),
        )

    n_star = int(np.max(esc_full)) + opts.extra_depth
    while True:
        lg0, th0, _ = tracker.run(pts, n_star)
        lg1, th1, e1 = tracker.run(pts, n_star + 1)
        if np.any(e1 < 0) or np.any(e1 > n_star):
            bad = int(np.argmax((e1 < 0) | (e1 > n_star)))
            raise LoopStraddlesJulia(
                f"refined sample at t={ts[bad]:.6f} did not escape by depth {n_star}",
                t=float(ts[bad]),
            )
        w0, mx0 = _winding_from_theta(th0, math.pi / 2)
        w1, mx1 = _winding_from_theta(th1, 0.95 * math.pi)
        if w0 is not None and w1 is not None and w1 == spec.d * w0:
            min_mod = float(np.exp(np.min(lg0)))
            frac = Fraction(w0, spec.d ** n_star)
            return (Mod1Rational.from_fraction(frac),
                    WindingCertificate(n_star, w0, True, min_mod, len(ts)))
        if len(ts) * 2 > opts.max_samples:
            raise StabilizationFailure(
                f"winding stabilization failed at {len(ts)} samples, depth {n_star} "
                f"(max arg steps {mx0:.3f}/{mx1:.3f})"
            )
        # refine globally: uniform dyadic refinement keeps the certificate's
        # "doubled resolution" semantics simple and reproducible
        n_new = len(ts) * 2
        ts = np.arange(n_new) / n_new
        pts = loop.points(ts)
        new_esc = tracker.run(pts, depth_cap)[2]
        if np.any(new_esc < 0):
            bad = int(np.argmax(new_esc < 0))
            raise LoopStraddlesJulia(
                f"loop sample at t={ts[bad]:.6f} did not escape within depth {depth_cap}",
                t=float(ts[bad]),
            )
        n_star = max(n_star, int(np.max(new_esc)) + opts.extra_depth)


def _spec_for_loop(arg, loop, opts):
    """Build the OrbitSpec matching a loop's ambient."""
    if isinstance(arg, FiberContext):
        if loop.ambient != "fiber":
            raise ValidationError("fiber context given but loop is planar")
        if abs(complex(loop.fiber_base) - arg.z0) > 1e-9 * (1 + abs(arg.z0)):
            raise ValidationError("loop fiber base does not match context")
        if arg.spec.n_steps < 8:
            raise ValidationError("fiber context too shallow for linking")
        return arg.spec
    if isinstance(arg, Poly1):
        return orbits.spec_from_poly(arg, opts.max_depth + 2)
    raise ValidationError("expected a FiberContext or a Poly1")


def linking_fiber(f, ctx, loop, opts=LinkOpts()):
    """Exact linking number of a loop in the fiber over ctx.z0 with the
    restriction of the Green's current to that fiber (the harmonic measure
    of the fiber filled set)."""
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    spec = _spec_for_loop(ctx, loop, opts)
    return _link_by_winding(spec, loop, opts)


def linking_poly_1d(g, loop, opts=LinkOpts()):
    """Exact linking of a planar loop with the maximal-entropy measure of a
    monic polynomial (the harmonic measure of its filled set)."""
    if loop.ambient != "plane":
        raise ValidationError("one-variable linking expects a planar loop")
    spec = _spec_for_loop(g if isinstance(g, Poly1) else Poly1(g), loop, opts)
    return _link_by_winding(spec, loop, opts)


def linking_cycle(spec_source, loops, opts=LinkOpts()):
    """Linking of a 1-cycle (formal sum of disjoint loops): windings add at a
    common certification depth, so the result is the exact mod-1 sum."""
    total = Mod1Rational(0, 1)
    certs = []
    for lp in loops:
        if isinstance(spec_source, FiberContext):
            val, cert = linking_fiber(spec_source.f, spec_source, lp, opts)
        else:
            val, cert = linking_poly_1d(spec_source, lp, opts)
        total = total + val
        certs.append(cert)
    return total, certs


def linking_at_infinity(endo, loop, opts=LinkOpts()):
    """Linking with the Green's current restricted to the line at infinity,
    computed on the polynomial restriction chart."""
    rest = restriction_at_infinity(endo)
    if not rest.is_polynomial:
        raise UnsupportedExactMode(
            "restriction at infinity is not a polynomial in either chart; "
            "exact linking unsupported (use the measure oracle estimate)"
        )
    if not rest.poly.is_monic:
        raise UnsupportedExactMode(
            "restriction at infinity is polynomial but not monic; exact mode requires "
            "the superattracting fixed point at the chart's infinity"
        )
    return linking_poly_1d(rest.poly, loop, opts), rest


# ---------------------------------------------------------------------------
# Pushforward and lifting.

def push_forward_loop(f, loop, resolution=2048):
    """Pointwise image of a fiber loop under the fiber map into the next
    fiber, resampled as a polyline."""
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    if loop.ambient != "fiber":
        raise ValidationError("push forward expects a fiber loop")
    z0 = complex(loop.fiber_base)
    pts = loop.sample(resolution)
    qz = f.q.fiber_poly(z0)
    img = qz.eval(pts)
    img = np.append(img, img[0])
    return OrientedLoop((PolylineSegment(tuple(img)),), "fiber", f.p.eval(z0))


def winding_about(loop, point, base_samples=1024, max_samples=1 << 16):
    """Integer winding number of a loop about a point (argument sum), with
    automatic densification; raises PerturbationRequired if the point sits
    on the loop."""
    n = base_samples
    while True:
        pts = loop.points(np.arange(n) / n)
        rel = pts - complex(point)
        dist = np.abs(rel)
        if np.min(dist) < 1e-12 * (1 + abs(point)):
            raise PerturbationRequired("point lies on the loop", complex(point))
        th = np.angle(rel)
        w, mx = _winding_from_theta(th, math.pi / 2)
        if w is not None:
            return w
        if n * 2 > max_samples:
            raise PerturbationRequired(
                "winding about point did not resolve (point too close to loop)",
                complex(point),
            )
        n *= 2


@dataclass(frozen=True)
class LiftBundle:
    """Closed lifted loops of a fiber preimage with their covering degrees."""

    lifts: tuple                 # OrientedLoop in fiber z1
    degrees: tuple               # covering degree k_i per lift
    source: OrientedLoop
    z1: complex
    permutation: tuple

    def __post_init__(self):
        if sum(self.degrees) != len(self.permutation):
            raise ValidationError("covering degrees do not sum to the fiber degree")

    def as_dict(self):
        return {
            "z1": [self.z1.real, self.z1.imag],
            "degrees": list(self.degrees),
            "permutation": list(self.permutation),
            "lifts": [lp.as_dict() for lp in self.lifts],
        }


def _continuation_targets(loop, n):
    ts = np.arange(n + 1) / n   # closed: last target = first
    return ts, loop.points(ts)


def lift_loop(f, z1, loop, opts=LinkOpts(), resolution=1024):
    """All preimages of a fiber loop under the fiber map q_{z1}.

    Predictor-corrector continuation of the d roots of q_{z1}(w) = loop(t)
    with Newton correction, adaptive step halving and root-collision
    detection; the monodromy permutation's cycles assemble the closed lifted
    loops, whose covering degrees are the cycle lengths.
    """
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    if loop.ambient != "fiber":
        raise ValidationError("lift expects a fiber loop")
    z0 = complex(loop.fiber_base)
    z1 = complex(z1)
    if abs(f.p.eval(z1) - z0) > 1e-8 * (1 + abs(z0)):
        raise ValidationError("z1 is not a base preimage of the loop's fiber")

    qz = f.q.fiber_poly(z1)
    d = qz.degree

    # margin pre-check: no critical value of q_{z1} within opts.margin of the loop
    cvs = fiber_critical_values(f, z1)
    samples = loop.sample(4096)
    scale = float(np.max(np.abs(samples - np.mean(samples))) + 1e-30)
    for cv in cvs:
        if np.min(np.abs(samples - cv)) < opts.margin * max(1.0, scale):
            raise PerturbationRequired(
                f"critical value {cv:.9g} lies within margin of the loop", complex(cv)
            )

    ts, targets = _continuation_targets(loop, resolution)
    shifted = Poly1(np.concatenate([qz.coeffs[:1] - targets[0], qz.coeffs[1:]]))
    current = roots(shifted)
    start = current.copy()
    track = [current.copy()]

    i = 1
    t_prev = 0.0
    while i <= resolution:
        t_next = ts[i]
        tgt = targets[i]
        ok, new = _newton_continue(qz, current, tgt, opts)
        if not ok:
            # halve the parameter step by inserting an intermediate target
            mid_t = 0.5 * (t_prev + t_next)
            if t_next - t_prev < 1e-9:
                raise PerturbationRequired(
                    "continuation stalled (root collision near a critical value)",
                    complex(tgt),
                )
            mid_target = loop.point(mid_t)
            ok_mid, new_mid = _newton_continue(qz, current, mid_target, opts)
            if not ok_mid:
                # recurse harder: densify between t_prev and mid
                ts = np.insert(ts, i, mid_t)
                targets = np.insert(targets, i, mid_target)
                resolution += 1
                continue
            current = new_mid
            track.append(current.copy())
            t_prev = mid_t
            ts = np.insert(ts, i, mid_t)
            targets = np.insert(targets, i, mid_target)
            resolution += 1
            i += 1
            continue
        current = new
        track.append(current.copy())
        t_prev = t_next
        i += 1

    # match final roots to initial roots -> monodromy permutation
    final = track[-1]
    perm = _match_permutation(start, final, opts)

    # assemble cycles
    arr = np.array(track)  # (steps, d)
    seen = set()
    lifts = []
    degrees = []
    for j0 in range(d):
        if j0 in seen:
            continue
        cycle = [j0]
        j = perm[j0]
        while j != j0:
            cycle.append(j)
            j = perm[j]
        seen.update(cycle)
        pts = []
        for j in cycle:
            pts.extend(arr[:-1, j])   # drop duplicated endpoint per leg
        pts.append(pts[0])
        lifts.append(OrientedLoop((PolylineSegment(tuple(pts)),), "fiber", z1))
        degrees.append(len(cycle))
    return LiftBundle(tuple(lifts), tuple(degrees), loop, z1, tuple(perm))


def _newton_continue(qz, current, target, opts, max_newton=12):
    """Newton-correct all d tracked roots of qz(w) = target from predictors
    `current`.  Returns (ok, roots)."""
    x = current.copy()
    d = len(x)
    scale = max(1.0, float(np.max(np.abs(x))))
    sep = _min_separation(current)
    for _ in range(max_newton):
        p, dp = qz.eval_with_deriv(x)
        p = p - target
        if np.any(dp == 0):
            return False, x
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-13 * scale:
            break
    else:
        return False, x
    # reject if roots moved more than a fraction of the previous separation
    if sep < np.inf and np.max(np.abs(x - current)) > 0.45 * sep:
        return False, x
    if _min_separation(x) < opts.collision_tol * scale:
        return False, x
    resid = np.abs(qz.eval(x) - target)
    if np.max(resid) > 1e-8 * max(1.0, abs(target)):
        return False, x
    return True, x


def _min_separation(x):
    if len(x) < 2:
        return np.inf
    diff = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(np.min(diff))


def _match_permutation(start, final, opts):
    """Greedy nearest matching final[j] -> start[perm[j]]; must be a bijection."""
    d = len(start)
    dist = np.abs(final[:, None] - start[None, :])
    perm = [-1] * d
    used = set()
    order = np.argsort(np.min(dist, axis=1))
    for j in order:
        k = int(np.argmin(dist[j]))
        if k in used:
            raise PerturbationRequired(
                "monodromy matching ambiguous (root collision at closure)",
                complex(final[j]),
            )
        used.add(k)
        perm[j] = k
    # perm maps track index j at t=1 to start index; monodromy sigma sends
    # start index perm[j] -> j (the branch that continues into it)
    sigma = [-1] * d
    for j, k in enumerate(perm):
        sigma[k] = j
    return sigma


def count_enclosed_critical_values(f, z_next, loop, margin=1e-9):
    """Number of critical values of the next fiber map inside the loop,
    counted with multiplicity (winding test)."""
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    cvs = fiber_critical_values(f, complex(z_next))
    samples = loop.sample(2048)
    scale = float(np.max(np.abs(samples - np.mean(samples))) + 1e-30)
    count = 0
    for cv in cvs:
        if np.min(np.abs(samples - cv)) < margin * max(1.0, scale):
            raise PerturbationRequired(
                f"critical value {cv:.9g} lies on the loop (within margin)", complex(cv)
            )
        if winding_about(loop, cv) != 0:
            count += 1
    return count
