"""Polynomial plumbing shared by every dynamics module.

One-variable polynomials are stored densely, ascending degree, as complex
arrays.  Two-variable ``q(z, w)`` (monic of degree d in w, polynomial
coefficients in z) is a list of those, ascending in w.  All escape radii
follow the conservative monic formula

    R = max(2, 2 * (1 + sum |lower coefficients|)),

which guarantees |p(x)| >= 2|x| and |x|^d / 2 <= |p(x)| <= 2 |x|^d for
|x| >= R.  Correctness over tightness: one radius check is all the
downstream winding certificates need.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import OverflowDetected, RootFindingError, ValidationError

# Raw doubles overflow at ~1e308; orbits switch representation well before.
OVERFLOW_GUARD = 1e300


@dataclass(frozen=True)
class ErrBound:
    """Certified error bound.  ``valid`` is False when the hypotheses behind
    the bound (escape radius reached, etc.) were not verified; callers must
    then deepen instead of trusting ``value``."""

    value: float
    valid: bool = True

    def __post_init__(self):
        if self.value < 0 or not np.isfinite(self.value):
            raise ValidationError(f"error bound must be finite and >= 0, got {self.value}")


def _as_coeff_array(coeffs):
    arr = np.asarray(coeffs, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("coefficients must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValidationError("coefficients must be finite")
    return arr


class Poly1:
    """Dense one-variable complex polynomial, coefficients ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = _as_coeff_array(coeffs)
        # strip trailing (leading-degree) zeros but keep at least the constant
        last = arr.size - 1
        while last > 0 and arr[last] == 0:
            last -= 1
        arr = arr[: last + 1].copy()
        if arr.size > 1 and arr[-1] == 0:
            raise ValidationError("leading coefficient is zero")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def is_monic(self):
        return self.coeffs[-1] == 1

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Horner evaluation; x may be a scalar or an ndarray."""
        if np.isscalar(x) or isinstance(x, complex):
            with np.errstate(over="ignore", invalid="ignore"):
                acc = complex(self.coeffs[-1])
                for c in self.coeffs[-2::-1]:
                    acc = acc * x + c
            if not (cmath.isfinite(acc) and abs(acc.real) <= OVERFLOW_GUARD
                    and abs(acc.imag) <= OVERFLOW_GUARD):
                raise OverflowDetected(f"polynomial value overflowed at |x|={abs(x):.3g}")
            return acc
        x = np.asarray(x, dtype=complex)
        acc = np.full(x.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        if not np.all(np.isfinite(acc.view(float))):
            raise OverflowDetected("polynomial evaluation overflowed")
        return acc

    def eval_with_deriv(self, x):
        """Value and derivative at x, one fused Horner pass."""
        if np.isscalar(x) or isinstance(x, complex):
            p = complex(self.coeffs[-1])
            dp = 0j
            for c in self.coeffs[-2::-1]:
                dp = dp * x + p
                p = p * x + c
            if not (cmath.isfinite(p) and abs(p.real) <= OVERFLOW_GUARD
                    and abs(p.imag) <= OVERFLOW_GUARD):
                raise OverflowDetected(f"polynomial value overflowed at |x|={abs(x):.3g}")
            return p, dp
        x = np.asarray(x, dtype=complex)
        p = np.full(x.shape, self.coeffs[-1], dtype=complex)
        dp = np.zeros(x.shape, dtype=complex)
        for c in self.coeffs[-2::-1]:
            dp = dp * x + p
            p = p * x + c
        return p, dp

    def deriv(self):
        if self.degree == 0:
            return Poly1([0.0])
        k = np.arange(1, self.coeffs.size)
        return Poly1(self.coeffs[1:] * k)

    def monic(self):
        return self if self.is_monic else Poly1(self.coeffs / self.coeffs[-1])

    def compose_iterate(self, x, n):
        """n-fold iterate applied to x (scalar)."""
        for _ in range(n):
            x = self.eval(x)
        return x

    def lower_abs_sum(self):
        """Sum of |c_i| over non-leading coefficients of the monic form."""
        c = self.coeffs / self.coeffs[-1]
        return float(np.sum(np.abs(c[:-1])))

    def __eq__(self, other):
        return isinstance(other, Poly1) and self.coeffs.shape == other.coeffs.shape \
            and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        terms = [f"({c:g})*x^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return "Poly1(" + (" + ".join(terms) if terms else "0") + ")"


class Poly2W:
    """q(z, w) = w^d + sum_{i<d} a_i(z) w^i with each a_i a Poly1 in z.

    The coefficient of w^d must be the constant polynomial 1.
    """

    __slots__ = ("w_coeffs",)

    def __init__(self, w_coeffs):
        ws = [c if isinstance(c, Poly1) else Poly1(c) for c in w_coeffs]
        if len(ws) < 2:
            raise ValidationError("w-degree must be >= 1")
        top = ws[-1]
        if top.degree != 0 or top.coeffs[0] != 1:
            raise ValidationError("coefficient of w^d must be the constant 1")
        self.w_coeffs = tuple(ws)

    @property
    def w_degree(self):
        return len(self.w_coeffs) - 1

    def eval(self, z, w):
        acc = 1.0 + 0j
        for a in self.w_coeffs[-2::-1]:
            acc = acc * w + a.eval(z)
        return acc

    def __call__(self, z, w):
        return self.eval(z, w)

    def deriv_w(self):
        d = self.w_degree
        cols = []
        for i in range(1, d + 1):
            cols.append(Poly1(self.w_coeffs[i].coeffs * i))
        # renormalize so the top coefficient is 1: d * w^{d-1} -> not monic.
        # deriv is not monic in general; return raw coefficient list instead.
        return cols  # ascending in w, degree d-1 poly in w with Poly1 entries

    def fiber_poly(self, z):
        """The one-variable fiber map q_z(w) as a Poly1."""
        return Poly1([a.eval(z) for a in self.w_coeffs])

    def coeff_rows(self, z_values):
        """Matrix of fiber coefficients a_i(z_n): shape (len(z_values), d+1)."""
        z = np.asarray(z_values, dtype=complex)
        rows = np.empty((z.size, self.w_degree + 1), dtype=complex)
        for i, a in enumerate(self.w_coeffs):
            rows[:, i] = a.eval(z)
        return rows

    def total_abs_sum(self):
        """Sum of |a_{ij}| over all non-leading (in w) coefficients."""
        return float(sum(np.sum(np.abs(a.coeffs)) for a in self.w_coeffs[:-1]))

    def __eq__(self, other):
        return isinstance(other, Poly2W) and len(self.w_coeffs) == len(other.w_coeffs) \
            and all(a == b for a, b in zip(self.w_coeffs, other.w_coeffs))

    def __repr__(self):
        return f"Poly2W(w_degree={self.w_degree})"


def poly1(coeffs):
    return Poly1(coeffs)


def poly2w(list_of_z_coeff_lists):
    return Poly2W(list_of_z_coeff_lists)


# ---------------------------------------------------------------------------
# Root finding: simultaneous Aberth-Ehrlich iteration.

def roots(poly, tol=1e-11, max_rounds=400):
    """All complex roots of poly, with multiplicity.

    Simultaneous (Aberth-Ehrlich) iteration from perturbed circular
    initializers.  Each returned root r satisfies
    |poly(r)| <= tol * max|coefficient|; failure to reach that residual
    raises RootFindingError carrying the best iterates.
    """
    if not isinstance(poly, Poly1):
        poly = Poly1(poly)
    d = poly.degree
    if d < 1:
        raise ValidationError("need degree >= 1 to extract roots")
    c = poly.coeffs / poly.coeffs[-1]
    scale = float(np.max(np.abs(poly.coeffs)))
    if d == 1:
        return np.array([-c[0]], dtype=complex)

    # Cauchy-style initial radius, perturbed angles to break symmetry.
    radius = 1.0 + float(np.max(np.abs(c[:-1])))
    angles = 2 * np.pi * (np.arange(d) + 0.25) / d + 0.4
    x = radius * np.exp(1j * angles) * (1 + 0.05 * np.cos(3 * angles))

    mono = Poly1(c)
    target = tol * scale / abs(poly.coeffs[-1])
    best = x.copy()
    best_res = np.inf
    for _ in range(max_rounds):
        p, dp = mono.eval_with_deriv(x)
        res = float(np.max(np.abs(p)))
        if res < best_res:
            best_res = res
            best = x.copy()
        if res <= target:
            return x
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / np.where(dp != 0, dp, 1), 0.0)
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            sums = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * sums
            step = np.where(np.abs(denom) > 1e-30, newton / np.where(denom != 0, denom, 1), newton)
        # where the derivative vanished exactly, nudge off the critical point
        bad = dp == 0
        if np.any(bad):
            step = step.copy()
            step[bad] = 0.1 * radius * np.exp(1j * np.random.default_rng(0).uniform(0, 2 * np.pi, bad.sum()))
        x = x - step
    # final residual check on the best iterates
    if best_res <= target:
        return best
    raise RootFindingError(
        f"Aberth iteration stalled: residual {best_res:.3g} > target {target:.3g}",
        best=best,
    )


def roots_batched(base_coeffs, targets, tol=1e-11, max_rounds=200):
    """Roots of p(x) = t for a batch of right-hand sides t.

    base_coeffs: ascending coefficients of a monic p (leading 1).
    targets: complex array, shape (N,).  Returns roots of shape (N, d).
    Used by backward-orbit sampling where only the constant term varies.
    """
    c = np.asarray(base_coeffs, dtype=complex)
    if c[-1] != 1:
        c = c / c[-1]
    d = c.size - 1
    t = np.asarray(targets, dtype=complex).ravel()
    n = t.size
    if d == 1:
        return (t - c[0]).reshape(n, 1)
    if d == 2:
        # closed form, vectorized
        b, a0 = c[1], c[0]
        disc = np.sqrt(b * b - 4 * (a0 - t))
        r1 = (-b + disc) / 2
        r2 = (-b - disc) / 2
        return np.stack([r1, r2], axis=1)

    radius = 1.0 + np.maximum(np.max(np.abs(c[:-1])), np.abs(t)) ** (1.0 / d)
    angles = 2 * np.pi * (np.arange(d) + 0.25) / d + 0.4
    x = radius[:, None] * np.exp(1j * angles)[None, :] * (1 + 0.05 * np.cos(3 * angles))[None, :]
    scale = np.maximum(np.max(np.abs(c)), np.abs(t))  # per-batch coefficient scale

    for _ in range(max_rounds):
        p = np.full(x.shape, c[-1], dtype=complex)
        dp = np.zeros(x.shape, dtype=complex)
        for k in range(d - 1, -1, -1):
            dp = dp * x + p
            p = p * x + c[k]
        p = p - t[:, None]
        res = np.max(np.abs(p), axis=1)
        if np.all(res <= tol * scale):
            return x
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / np.where(dp != 0, dp, 1), 0.0)
            diff = x[:, :, None] - x[:, None, :]
            idx = np.arange(d)
            diff[:, idx, idx] = np.inf
            sums = np.sum(1.0 / diff, axis=2)
            denom = 1.0 - newton * sums
            step = np.where(np.abs(denom) > 1e-30, newton / np.where(denom != 0, denom, 1), newton)
        x = x - step
    bad = int(np.sum(res > tol * scale))
    raise RootFindingError(f"batched root solve: {bad}/{n} rows unconverged", best=x)


# ---------------------------------------------------------------------------
# Escape radii.

def escape_radius(poly):
    """R with |poly(x)| >= 2|x| and |x|^d/2 <= |poly(x)| <= 2|x|^d for |x| >= R.

    poly must be monic of degree >= 1.
    """
    if not isinstance(poly, Poly1):
        poly = Poly1(poly)
    if not poly.is_monic:
        raise ValidationError("escape radius formula requires a monic polynomial")
    return max(2.0, 2.0 * (1.0 + poly.lower_abs_sum()))


def escape_radius_fiberwise(q, z_bound):
    """Fiberwise escape radius, uniform over |z| <= z_bound.

    Bounds each coefficient polynomial a_i(z) on the disc by the triangle
    inequality and applies the monic formula.
    """
    if not isinstance(q, Poly2W):
        raise ValidationError("expected a Poly2W")
    if z_bound < 0:
        raise ValidationError("z_bound must be >= 0")
    total = 0.0
    for a in q.w_coeffs[:-1]:
        powers = z_bound ** np.arange(a.coeffs.size)
        total += float(np.sum(np.abs(a.coeffs) * powers))
    return max(2.0, 2.0 * (1.0 + total))


def vertical_escape_kappa(p, q):
    """Dominance factor kappa for the unconditional vertical-escape test.

    If |w_n| >= kappa * max(|z_n|, 1) at any orbit step, the w-coordinate
    escapes to infinity regardless of what the base orbit later does, and
    |w|^d/2 <= |q_z(w)| <= (3/2)|w|^d holds at every subsequent step.
    """
    a_total = q.total_abs_sum()
    s_p = p.lower_abs_sum()
    d = q.w_degree
    return max(4.0, 2.0 * (1.0 + a_total), (2.0 * (1.0 + s_p)) ** (1.0 / (d - 1)) if d > 1 else 4.0)


def tail_ratio_bound(lower_abs_sum, modulus, degree):
    """Per-step bound on |log(|p(x)| / |x|^d)| for |x| >= modulus (>= radius).

    s = sum |c_i| modulus^{i-d} <= lower_abs_sum / modulus; the ratio lies in
    [1-s, 1+s], so the log is bounded by -log(1-s).  Exactly zero for pure
    powers, which keeps e.g. G(z^2) certificates at bound 0.
    """
    if lower_abs_sum == 0.0:
        return 0.0
    s = min(0.5, lower_abs_sum / max(modulus, 1.0))
    return float(-np.log1p(-s))
