"""Certified orbit iteration shared by the Green-function and linking code.

An OrbitSpec packages, for a sequence of one-variable maps (the fiber maps
along a base orbit, or a single polynomial repeated), the per-step ascending
coefficient rows together with per-step escape thresholds.

Thresholds.  For a single monic polynomial the classical radius
R = max(2, 2(1+S)) certifies escape.  For fiber maps q_{z_n} along a base
orbit the threshold is kappa * max(|z_n|, 1) with kappa from
`vertical_escape_kappa`; crossing it certifies that the w-coordinate escapes
to infinity no matter what the base orbit does afterwards, and that
|w|^d/2 <= |q_z(w)| <= (3/2)|w|^d holds from then on.  Those two-sided
bounds are what make the winding/d^n linking computation exact.

Tail bounds.  After escape at depth m with modulus x and dominance ratio
rho = x / max(|z_m|, 1), each later step satisfies
|log(|q(w)|/|w|^d)| <= -log(1 - s) with s <= A / min(rho, x), and s is
non-increasing along the orbit, so

    |G - log(x)/d^m| <= -log(1 - s_m) / (d^m (d - 1)).

For pure powers (A = 0) the bound is exactly zero.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .numerics import Poly1, Poly2W, escape_radius, vertical_escape_kappa


def big_modulus(d):
    """Largest orbit modulus that can still be advanced one step in doubles."""
    return 10.0 ** min(150, 300 // d - 2)


def _shrink(amount, d, depth):
    """amount / d^depth without integer-power overflow; 0.0 once the result
    falls below double precision entirely."""
    if amount <= 0.0:
        return 0.0
    log_val = np.log(amount) - depth * np.log(d)
    if log_val < -700.0:
        return 0.0
    return float(np.exp(log_val))


@dataclass(frozen=True)
class OrbitSpec:
    """Coefficient rows and certified escape thresholds for n_steps fiber maps.

    coeff_rows[n] are the ascending coefficients of the map applied at time n;
    thresh[n] is the certified escape threshold for a point at time n;
    base_orbit is the underlying base orbit (empty for plain 1-D dynamics);
    lower_abs is the constant A in the tail bound.

    frozen_at marks where the base orbit left the numerically certifiable
    range (the orbit and rows are held constant from there); escape may only
    be certified at steps strictly below it.
    """

    d: int
    coeff_rows: np.ndarray
    thresh: np.ndarray
    base_orbit: np.ndarray
    lower_abs: float
    frozen_at: int = 1 << 30

    @property
    def n_steps(self):
        return self.coeff_rows.shape[0]

    @property
    def certified_steps(self):
        return min(self.n_steps, self.frozen_at)

    def tail_bound(self, depth, modulus):
        """Certified |G - log(modulus)/d^depth| bound at readout time."""
        if self.lower_abs == 0.0:
            return 0.0
        if depth < len(self.base_orbit):
            zmod = max(abs(self.base_orbit[depth]), 1.0)
        elif len(self.base_orbit):
            zmod = max(abs(self.base_orbit[-1]), 1.0)
        else:
            zmod = 1.0
        rho = modulus / zmod if len(self.base_orbit) else np.inf
        s = min(0.5, self.lower_abs / max(1.0, min(rho, modulus)))
        return _shrink(-np.log1p(-s) / (self.d - 1), self.d, depth)

    def trapped_bound(self, depth, w_modulus=0.0):
        """Upper bound on the potential of a point that stayed below the
        escape threshold through `depth` certified steps (its modulus then
        being w_modulus)."""
        t = float(self.thresh[min(depth, self.n_steps - 1)])
        m = max(t, w_modulus, 2.0)
        return _shrink(np.log(m) + np.log(2.0) / (self.d - 1), self.d, depth)


def spec_from_poly(g, n_steps):
    """OrbitSpec for iterating a single monic polynomial g."""
    if not isinstance(g, Poly1):
        g = Poly1(g)
    if not g.is_monic:
        raise ValidationError("dynamics requires a monic polynomial")
    if g.degree < 2:
        raise ValidationError("dynamics requires degree >= 2")
    row = g.coeffs.astype(complex)
    rows = np.tile(row, (n_steps, 1))
    r = escape_radius(g)
    return OrbitSpec(
        d=g.degree,
        coeff_rows=rows,
        thresh=np.full(n_steps, r),
        base_orbit=np.empty(0, dtype=complex),
        lower_abs=g.lower_abs_sum(),
    )


def spec_from_fiber(p, q, z0, n_steps):
    """OrbitSpec for the fiber maps q_{z_n} along the forward orbit of z0.

    The base orbit is tracked only while |z| stays below a cap chosen so that
    one fiber advance from below the escape threshold cannot overflow doubles;
    past the cap the orbit is held (frozen) and escape certification stops.
    """
    if not isinstance(p, Poly1):
        p = Poly1(p)
    if not isinstance(q, Poly2W):
        raise ValidationError("expected a Poly2W for the fiber component")
    d = q.w_degree
    kappa = vertical_escape_kappa(p, q)
    # |w| <= kappa*|z| must survive w -> ~2|w|^d after one more base step
    # (|z| -> ~(1+S_p)|z|^d), so cap log10|z| accordingly.
    s_p = p.lower_abs_sum()
    zcap = 10.0 ** ((300.0 - d * np.log10(2 * kappa * (1 + s_p))) / d ** 2)

    orbit = np.empty(n_steps, dtype=complex)
    z = complex(z0)
    frozen_at = 1 << 30
    for n in range(n_steps):
        orbit[n] = z
        if abs(z) > zcap:
            orbit[n:] = z
            frozen_at = n
            break
        z = p.eval(z)
    rows = q.coeff_rows(orbit)
    thresh = kappa * np.maximum(np.abs(orbit), 1.0)
    return OrbitSpec(
        d=d,
        coeff_rows=rows,
        thresh=thresh,
        base_orbit=orbit,
        lower_abs=q.total_abs_sum(),
        frozen_at=frozen_at,
    )


def advance(spec, w, n):
    """One orbit step: apply the time-n map to w (scalar or array)."""
    row = spec.coeff_rows[n]
    acc = np.full(np.shape(w), row[-1], dtype=complex) if np.ndim(w) else complex(row[-1])
    for c in row[-2::-1]:
        acc = acc * w + c
    return acc


def scalar_green(spec, w0, target_err=1e-10, max_depth=None):
    """Certified escape-rate potential of a single starting point.

    Returns (value, depth, bound, escaped):
      escaped True : value = log|w_m|/d^m with |G - value| <= bound;
      escaped False: value = 0, orbit below threshold through `depth` steps,
                     and 0 <= G <= bound.

    Escape is only certified at steps where the base orbit is still tracked
    exactly (below spec.frozen_at); points that reach the frozen range
    untrapped are reported bounded-through-depth with the bound taken from
    their actual modulus there.
    """
    if max_depth is None:
        max_depth = spec.n_steps
    depth_cap = min(max_depth, spec.certified_steps)
    big = big_modulus(spec.d)
    w = complex(w0)
    esc = -1
    for n in range(depth_cap):
        a = abs(w)
        if a > spec.thresh[n]:
            esc = n
            break
        w = advance(spec, w, n)
    else:
        return 0.0, depth_cap, spec.trapped_bound(depth_cap, abs(w)), False

    m = esc
    bound = spec.tail_bound(m, abs(w))
    while m < depth_cap and bound > target_err and abs(w) <= big:
        w = advance(spec, w, m)
        m += 1
        bound = spec.tail_bound(m, abs(w))
    value = _shrink(float(np.log(abs(w))), spec.d, m)
    return value, m, bound, True
