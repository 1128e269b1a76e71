"""One-variable dynamics: base Green's function, critical-orbit
classification, Mandelbrot membership and the restriction of a polynomial
endomorphism of the projective plane to the line at infinity.
"""

from dataclasses import dataclass, field

import numpy as np

from . import orbits
from .errors import ValidationError
from .numerics import ErrBound, Poly1, roots


@dataclass(frozen=True)
class GreenValue:
    """Escape-rate potential estimate, natural-log units.

    value == 0.0 exactly when the orbit stayed below the escape threshold
    through `depth` steps; the true potential then lies in [0, bound.value].
    Otherwise the orbit escaped and the true potential lies within
    value +/- bound.value.
    """

    value: float
    depth: int
    bound: ErrBound
    escaped: bool

    @property
    def certified_positive(self):
        return self.escaped and self.bound.valid and self.value - self.bound.value > 0

    @property
    def bounded_through_depth(self):
        return not self.escaped

    def as_dict(self):
        return {
            "value": self.value,
            "depth": self.depth,
            "bound": self.bound.value,
            "bound_valid": self.bound.valid,
            "escaped": self.escaped,
        }


def green_poly(p, z, target_err=1e-10, max_depth=200):
    """Certified Green's function of a monic polynomial at a point.

    Escape is certified at the conservative radius; after escape the value
    is refined until the geometric tail bound drops below target_err (or the
    orbit modulus passes the overflow guard, at which point the bound is far
    below any sensible target).
    """
    if not isinstance(p, Poly1):
        p = Poly1(p)
    spec = orbits.spec_from_poly(p, max_depth)
    value, depth, bound, escaped = orbits.scalar_green(spec, z, target_err, max_depth)
    return GreenValue(value, depth, ErrBound(bound), escaped)


@dataclass(frozen=True)
class CriticalPointReport:
    point: complex
    escaped: bool
    green: GreenValue
    period: int | None  # None = undetermined / not applicable

    def as_dict(self):
        return {
            "point": [self.point.real, self.point.imag],
            "escaped": self.escaped,
            "green": self.green.as_dict(),
            "period": self.period,
        }


@dataclass(frozen=True)
class CriticalReport:
    poly_degree: int
    entries: tuple

    @property
    def any_escaping(self):
        return any(e.escaped for e in self.entries)

    @property
    def all_bounded(self):
        return all(not e.escaped for e in self.entries)

    def as_dict(self):
        return {"degree": self.poly_degree, "critical_points": [e.as_dict() for e in self.entries]}


def _detect_period(orbit_tail, tol=1e-9):
    """Smallest near-return period in the tail of a bounded orbit, or None.

    Heuristic cycle detection: reported as 'detected', never 'proved'.
    """
    n = len(orbit_tail)
    if n < 4:
        return None
    for period in range(1, n // 2 + 1):
        deltas = np.abs(orbit_tail[period:] - orbit_tail[:-period])
        if np.max(deltas) < tol:
            return period
    return None


def critical_report(p, max_iter=2000, cycle_tol=1e-9, target_err=1e-10):
    """Classify every critical point of p: certified escape, or bounded with
    a (heuristically) detected attracting-cycle period."""
    if not isinstance(p, Poly1):
        p = Poly1(p)
    if p.degree < 2:
        raise ValidationError("critical classification needs degree >= 2")
    crit = roots(p.deriv())
    entries = []
    for c in sorted(crit, key=lambda x: (round(x.real, 12), round(x.imag, 12))):
        g = green_poly(p, c, target_err=target_err, max_depth=max_iter)
        if g.escaped:
            entries.append(CriticalPointReport(complex(c), True, g, None))
            continue
        # bounded: detect a cycle over the last quarter of the orbit
        orbit = np.empty(max_iter, dtype=complex)
        x = complex(c)
        for i in range(max_iter):
            orbit[i] = x
            x = p.eval(x)
        period = _detect_period(orbit[3 * max_iter // 4:], cycle_tol)
        entries.append(CriticalPointReport(complex(c), False, g, period))
    return CriticalReport(p.degree, tuple(entries))


def mandelbrot_member(a, max_iter=2000):
    """Critical-orbit escape test for w^2 + a.

    Returns ("inside", None) when the orbit stays bounded through max_iter,
    ("outside", escape_depth) otherwise.  Membership through finite iteration
    only; "inside" means bounded-through-depth.
    """
    a = complex(a)
    radius = max(2.0, abs(a))
    w = a
    for n in range(1, max_iter + 1):
        if abs(w) > radius:
            return ("outside", n)
        w = w * w + a
    return ("inside", None)


# ---------------------------------------------------------------------------
# Restriction of a polynomial endomorphism to the line at infinity.

@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous binary form sum c_i Z^i W^(deg-i), coefficients ascending in Z."""

    coeffs: np.ndarray  # complex, len = deg+1

    @property
    def degree(self):
        return self.coeffs.size - 1

    def is_pure_Z(self, tol=1e-12):
        scale = np.max(np.abs(self.coeffs))
        return abs(self.coeffs[-1]) > tol * scale and np.all(np.abs(self.coeffs[:-1]) <= tol * scale)

    def is_pure_W(self, tol=1e-12):
        scale = np.max(np.abs(self.coeffs))
        return abs(self.coeffs[0]) > tol * scale and np.all(np.abs(self.coeffs[1:]) <= tol * scale)

    def dehomogenize_W(self):
        """Polynomial in zeta = Z/W (set W = 1)."""
        return Poly1(self.coeffs)

    def dehomogenize_Z(self):
        """Polynomial in xi = W/Z (set Z = 1)."""
        return Poly1(self.coeffs[::-1])


@dataclass(frozen=True)
class RestrictionAtInfinity:
    """The induced degree-d map [P0 : Q0] on the line at infinity.

    When Q0 is a pure power of W the map is a polynomial in the chart
    zeta = Z/W; when P0 is a pure power of Z it is a polynomial in the chart
    xi = W/Z.  Exact linking at infinity is supported only in those cases.
    """

    p0: BinaryForm
    q0: BinaryForm
    is_polynomial: bool
    chart: str | None            # "Z/W" | "W/Z" | None
    poly: Poly1 | None = field(default=None)

    def as_dict(self):
        return {
            "is_polynomial": self.is_polynomial,
            "chart": self.chart,
            "poly_coeffs": None if self.poly is None else
                [[c.real, c.imag] for c in self.poly.coeffs],
        }


def _common_root_check(p0, q0, tol=1e-9):
    """Reject binary forms sharing a projective root (degenerate endo)."""
    cp, cq = p0.coeffs, q0.coeffs
    sp = np.max(np.abs(cp))
    sq = np.max(np.abs(cq))
    if sp == 0 or sq == 0:
        raise ValidationError("restriction at infinity is identically zero")
    # shared root at [1:0] (both leading-in-Z coefficients vanish)
    if abs(cp[-1]) <= tol * sp and abs(cq[-1]) <= tol * sq:
        raise ValidationError("P0 and Q0 share the root [1:0] at infinity")
    # shared root at [0:1]
    if abs(cp[0]) <= tol * sp and abs(cq[0]) <= tol * sq:
        raise ValidationError("P0 and Q0 share the root [0:1] at infinity")
    # finite chart: compare root sets of the dehomogenizations
    rp = roots(Poly1(cp)) if Poly1(cp).degree >= 1 else np.empty(0, complex)
    rq = roots(Poly1(cq)) if Poly1(cq).degree >= 1 else np.empty(0, complex)
    if rp.size and rq.size:
        dist = np.abs(rp[:, None] - rq[None, :])
        if np.min(dist) <= tol * (1 + np.max(np.abs(np.concatenate([rp, rq])))):
            raise ValidationError(
                f"P0 and Q0 share a root near {rp.flat[np.argmin(np.min(dist, axis=1))]:.6g}"
            )


def restriction_at_infinity(endo):
    """Restrict a polynomial endomorphism [P:Q:T^d] to the line T = 0.

    `endo` is a skewdyn.PolyEndo2.  Returns the pair of binary forms and,
    when one of them is a pure coordinate power, the induced monic polynomial
    in the corresponding affine chart of the line at infinity.
    """
    p0 = BinaryForm(endo.P.restrict_t0())
    q0 = BinaryForm(endo.Q.restrict_t0())
    _common_root_check(p0, q0)
    if q0.is_pure_W():
        lead = q0.coeffs[0]
        return RestrictionAtInfinity(p0, q0, True, "Z/W", Poly1(p0.coeffs / lead))
    if p0.is_pure_Z():
        lead = p0.coeffs[-1]
        f_pi = Poly1(q0.coeffs[::-1] / lead)
        return RestrictionAtInfinity(p0, q0, True, "W/Z", f_pi)
    return RestrictionAtInfinity(p0, q0, False, None, None)
