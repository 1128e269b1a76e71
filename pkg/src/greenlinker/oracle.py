"""Independent Monte-Carlo oracle for harmonic / maximal-entropy measures.

Backward-orbit equidistribution: pulling a non-exceptional basepoint back
through uniformly random inverse branches equidistributes toward the
balanced measure, which for polynomials is the harmonic measure of the
filled set.  Used to cross-validate the exact winding results and to
estimate measures where the exact route is unavailable.

The reported standard error is binomial only; depth bias of the backward
iteration is not quantified.
"""

from dataclasses import dataclass

import numpy as np

from .errors import Undetermined, ValidationError
from .linking import Mod1Rational
from .numerics import Poly1, escape_radius, roots_batched
from .skewdyn import SkewProduct, fiber_context


@dataclass(frozen=True)
class EmpiricalMeasure:
    points: np.ndarray
    seed: int
    depth: int
    count: int
    resample_count: int = 0

    def as_dict(self):
        return {
            "seed": self.seed,
            "depth": self.depth,
            "count": self.count,
            "resample_count": self.resample_count,
        }


def _pullback_chain(coeff_list, basepoint, depth, count, seed):
    """Pull `count` copies of basepoint back through the maps in coeff_list
    (applied last-to-first), choosing a uniformly random branch each step.

    coeff_list[k] are the ascending coefficients of the map from fiber k+1
    to fiber k (or the same polynomial repeated, in the 1-D case)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    choices = rng.integers(0, len(coeff_list[0]) - 1, size=(depth, count))
    pts = np.full(count, complex(basepoint), dtype=complex)
    n_resampled = 0
    for step in range(depth):
        coeffs = coeff_list[min(step, len(coeff_list) - 1)]
        try:
            rts = roots_batched(coeffs, pts)
        except Undetermined:
            # retry unconverged rows one-by-one with the scalar solver
            rts = None
        if rts is None:
            from .numerics import roots as roots_scalar
            d = len(coeffs) - 1
            rts = np.empty((count, d), dtype=complex)
            for i, t in enumerate(pts):
                shifted = Poly1(np.concatenate([coeffs[:1] - t, coeffs[1:]]))
                try:
                    rts[i] = roots_scalar(shifted)
                except Undetermined:
                    n_resampled += 1
                    if n_resampled > max(1, count // 100):
                        raise Undetermined(
                            f"more than 1% of backward branches failed "
                            f"({n_resampled}/{count})"
                        )
                    rts[i] = np.full(d, complex(basepoint))
        pts = rts[np.arange(count), choices[step]]
    return pts, n_resampled


def brolin_sample(g, basepoint, depth=24, count=100_000, seed=0):
    """Backward-orbit samples approximating the maximal-entropy measure of a
    monic polynomial g (equivalently the harmonic measure of its filled set).

    basepoint must be non-exceptional; |basepoint| > escape radius suffices
    and is enforced.
    """
    if not isinstance(g, Poly1):
        g = Poly1(g)
    if abs(basepoint) <= escape_radius(g):
        raise ValidationError(
            f"basepoint must lie outside the escape radius {escape_radius(g):.3g}"
        )
    coeffs = [g.coeffs]
    pts, n_res = _pullback_chain(coeffs, basepoint, depth, count, seed)
    return EmpiricalMeasure(pts, seed, depth, count, n_res)


def brolin_sample_fiber(f, z0, basepoint=None, depth=24, count=100_000, seed=0):
    """Backward samples of the harmonic measure on the fiber filled set over
    z0: the basepoint, placed in the depth-th forward fiber, is pulled back
    through the fiber maps along the forward base orbit in reverse order,
    landing in the fiber over z0."""
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    ctx = fiber_context(f, z0, depth + 1)
    rows = ctx.spec.coeff_rows
    if basepoint is None:
        basepoint = 2.0 * float(np.max(ctx.spec.thresh[:depth + 1]))
    else:
        if abs(basepoint) <= ctx.spec.thresh[depth]:
            raise ValidationError(
                "fiber basepoint must lie outside the fiberwise escape threshold"
            )
    # maps applied in pull-back order: q_{z_{depth-1}}, ..., q_{z_0}
    coeff_list = [rows[n] for n in range(depth - 1, -1, -1)]
    pts, n_res = _pullback_chain(coeff_list, basepoint, depth, count, seed)
    return EmpiricalMeasure(pts, seed, depth, count, n_res)


@dataclass(frozen=True)
class MassEstimate:
    estimate: float
    stderr: float
    n_inside: int
    n_used: int
    n_discarded: int

    def as_dict(self):
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n_inside": self.n_inside,
            "n_used": self.n_used,
            "n_discarded": self.n_discarded,
        }


def estimate_enclosed_mass(measure, loop, on_loop_tol=1e-9, loop_samples=1024):
    """Fraction of samples with odd winding parity inside the loop, with the
    binomial standard error.  Samples within on_loop_tol of the loop polyline
    are discarded (and counted)."""
    pts = measure.points
    verts = loop.sample(loop_samples)
    # winding parity via summed argument increments, one edge at a time
    total = np.zeros(pts.size)
    closed = np.append(verts, verts[0])
    mind = np.full(pts.size, np.inf)
    for a, b in zip(closed[:-1], closed[1:]):
        ra = a - pts
        rb = b - pts
        d = np.angle(rb / np.where(ra == 0, 1e-300, ra))
        total += d
        mind = np.minimum(mind, np.abs(ra))
    discard = mind < on_loop_tol
    wind = np.round(total / (2 * np.pi)).astype(int)
    inside = (wind % 2 != 0) & ~discard
    n_used = int(pts.size - discard.sum())
    if n_used == 0:
        raise ValidationError("all samples were discarded as lying on the loop")
    est = float(inside.sum() / n_used)
    stderr = float(np.sqrt(max(est * (1 - est), 1e-300) / n_used))
    return MassEstimate(est, stderr, int(inside.sum()), n_used, int(discard.sum()))


def snap_to_dyadic(estimate, stderr, d, n_max):
    """Nearest k/d^n (n <= n_max) to the estimate, or None.

    Scans n upward; at the first n whose nearest candidate lies within
    3*stderr, the call succeeds only if the second-nearest candidate at that
    n is more than 6*stderr away (no ambiguity); otherwise returns None.
    """
    if stderr < 0:
        raise ValidationError("stderr must be >= 0")
    x = estimate % 1.0
    for n in range(n_max + 1):
        den = d ** n
        k = round(x * den)
        cand = k / den
        if abs(x - cand) <= 3 * stderr:
            second = min(abs(x - (k - 1) / den), abs(x - (k + 1) / den))
            if second > 6 * stderr:
                return Mod1Rational(k % den, den)
            return None
    return None
