"""Iterated-preimage linking sequences.

Starting from a seed loop with nonzero linking in a fiber over z0, repeatedly
lift through fiber maps along a backward base orbit, each time selecting a
lifted loop that bounds a preimage disc and encloses at most d-2 critical
values of the next fiber map.  The pairing of the chosen disc contracts by
k_i/d <= (d-1)/d per step while staying positive, so the emitted linking
values are nonzero, pairwise distinct, and converge to 0 in Q/Z: the
infinitely-generated-first-homology certificate.
"""

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PerturbationRequired, Undetermined, ValidationError
from .linking import (
    LinkOpts,
    Mod1Rational,
    count_enclosed_critical_values,
    lift_loop,
    linking_fiber,
    winding_about,
)
from .numerics import Poly1, roots
from .skewdyn import SkewProduct, fiber_context


def largest_modulus_preimage(p, z):
    """Default backward-orbit chooser: the preimage of z under p with the
    largest modulus; ties broken by the largest principal argument."""
    pre = roots(Poly1(np.concatenate([p.coeffs[:1] - z, p.coeffs[1:]])))
    best = max(pre, key=lambda r: (round(abs(r), 12), np.angle(r)))
    return complex(best)


@dataclass(frozen=True)
class SequenceStep:
    index: int
    fiber_base: complex
    loop: object
    lk: Mod1Rational
    mass: Fraction            # real pairing with the current, in (0, 1)
    covering_degrees: tuple   # degrees of the full bundle lifted FROM this loop's parent
    chosen_degree: int | None # k_i of the lift that produced this loop (None for the seed)
    certificate: object

    def as_dict(self):
        return {
            "index": self.index,
            "fiber_base": [self.fiber_base.real, self.fiber_base.imag],
            "lk": self.lk.as_dict(),
            "mass": {"num": self.mass.numerator, "den": self.mass.denominator},
            "covering_degrees": list(self.covering_degrees),
            "chosen_degree": self.chosen_degree,
            "certificate": self.certificate.as_dict(),
            "loop": self.loop.as_dict(),
        }


def _jittered(loop, attempt):
    """Radial jitter about the loop centroid: factors 1 +/- k*1e-6."""
    k = (attempt + 2) // 2
    factor = 1 + (1e-6 * k if attempt % 2 == 0 else -1e-6 * k)
    return loop.scaled_about(loop.centroid(), factor)


def _with_jitter(action, loop, retries=8):
    """Run action(loop); on PerturbationRequired retry with jittered copies."""
    last = None
    for attempt in range(retries + 1):
        cand = loop if attempt == 0 else _jittered(loop, attempt - 1)
        try:
            return action(cand), cand
        except PerturbationRequired as exc:
            last = exc
    raise last


def _innermost(lifts):
    """Indices of lifted loops that contain no other lifted loop.

    The lifted loops are disjoint simple curves, so "L_j inside L_i" is a
    single winding test of L_i about any point of L_j; innermost loops bound
    preimage disc components."""
    idx = []
    probes = [lp.point(0.0) for lp in lifts]
    for i, li in enumerate(lifts):
        contains_other = False
        for j, pj in enumerate(probes):
            if i == j:
                continue
            if winding_about(li, pj) != 0:
                contains_other = True
                break
        if not contains_other:
            idx.append(i)
    return idx


def generate_linking_sequence(f, z0, seed_loop, steps, chooser=None,
                              opts=LinkOpts(), ctx_depth=None):
    """Certified linking sequence of length steps+1 starting from seed_loop.

    chooser(p, z) -> a preimage of z under p; default largest modulus with
    argument tie-break, which makes runs reproducible.  A step that cannot
    find an admissible lifted loop after the jitter budget truncates the
    sequence with a warning (reported, never fabricated).
    """
    if not isinstance(f, SkewProduct):
        raise ValidationError("expected a SkewProduct")
    if chooser is None:
        chooser = largest_modulus_preimage
    if ctx_depth is None:
        ctx_depth = max(opts.max_depth + 2, 200)

    z0 = complex(z0)
    # backward base orbit z_0, z_1, ..., z_{steps+1} (one extra: the
    # admissibility test at step n needs the critical values of q_{z_{n+2}})
    zs = [z0]
    for _ in range(steps + 1):
        zs.append(chooser(f.p, zs[-1]))

    ctx0 = fiber_context(f, z0, ctx_depth)
    lk0, cert0 = linking_fiber(f, ctx0, seed_loop, opts)
    if lk0.is_zero:
        raise ValidationError(
            "seed loop has zero linking number; no separating seed exists "
            "(for connected fiber Julia sets no nonzero seed can be found)"
        )
    if cert0.winding < 0:
        raise ValidationError(
            "seed loop is negatively oriented; orient it positively so the "
            "pairing equals the enclosed measure"
        )
    mass0 = Fraction(cert0.winding, f.d ** cert0.depth)
    out = [SequenceStep(0, z0, seed_loop, lk0, mass0, (), None, cert0)]

    current = seed_loop
    mass = mass0
    for n in range(steps):
        z_next = zs[n + 1]
        z_after = zs[n + 2]

        # the loop about to be lifted must enclose at most d-2 critical
        # values of the covering fiber map (guarantees >= 2 preimage discs)
        def _admissible(lp):
            cnt = count_enclosed_critical_values(f, z_next, lp, margin=opts.margin)
            if cnt > f.d - 2:
                raise ValidationError(
                    f"step {n}: loop encloses {cnt} critical values of the next "
                    f"fiber map (> d-2 = {f.d - 2}); cannot contract"
                )
            return cnt

        try:
            _, current = _with_jitter(_admissible, current)
        except PerturbationRequired as exc:
            warnings.warn(f"sequence truncated at step {n}: {exc}")
            break

        try:
            bundle, current = _with_jitter(lambda lp: lift_loop(f, z_next, lp, opts), current)
        except PerturbationRequired as exc:
            warnings.warn(f"sequence truncated at step {n}: {exc}")
            break

        ctx_next = fiber_context(f, z_next, ctx_depth)
        candidates = _innermost(bundle.lifts)
        candidates.sort(key=lambda i: (round(bundle.lifts[i].centroid().real, 9),
                                       round(bundle.lifts[i].centroid().imag, 9)))
        chosen = None
        for i in candidates:
            lp = bundle.lifts[i]
            try:
                cnt = count_enclosed_critical_values(f, z_after, lp, margin=opts.margin)
            except PerturbationRequired:
                try:
                    cnt, lp = _with_jitter(
                        lambda cand: count_enclosed_critical_values(
                            f, z_after, cand, margin=opts.margin), lp)
                except PerturbationRequired:
                    continue
            if cnt <= f.d - 2:
                chosen = (i, lp)
                break
        if chosen is None:
            warnings.warn(f"sequence truncated at step {n}: no admissible lifted disc")
            break
        i, lp = chosen
        k_i = bundle.degrees[i]

        lk_n, cert_n = linking_fiber(f, ctx_next, lp, opts)
        if cert_n.winding < 0:
            lp = lp.reversed()
            lk_n, cert_n = linking_fiber(f, ctx_next, lp, opts)
        # pairing identity d*lk(L_i) = k_i*lk(gamma) (mod 1), exact
        if lk_n.times(f.d) != out[-1].lk.times(k_i):
            raise Undetermined(
                f"lift pairing identity failed at step {n}: "
                f"d*{lk_n} != k_i*{out[-1].lk} (mod 1)"
            )
        mass = mass * Fraction(k_i, f.d)
        if Mod1Rational.from_fraction(mass) != lk_n:
            raise Undetermined(
                f"step {n}: measured linking {lk_n} does not match the "
                f"transferred pairing {mass} (mod 1)"
            )
        out.append(SequenceStep(n + 1, z_next, lp, lk_n, mass,
                                bundle.degrees, k_i, cert_n))
        current = lp
    return out
