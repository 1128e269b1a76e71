"""Command-line front end.

Every run prints a single JSON document to stdout (or --out FILE) embedding
the fully-resolved job spec, so results are reproducible byte-for-byte given
the same build.  Exact rationals serialize as {"num": k, "den": m}.

Exit codes: 0 success, 2 validation error, 3 numerical non-certification
(undetermined), 4 internal error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .contours import find_separating_loops
from .dynamics1d import green_poly, mandelbrot_member, restriction_at_infinity
from .errors import Undetermined, ValidationError
from .linking import (
    LinkOpts,
    lift_loop,
    linking_at_infinity,
    linking_fiber,
    loop_from_dict,
)
from .maps import get_map
from .oracle import brolin_sample, brolin_sample_fiber, estimate_enclosed_mass, snap_to_dyadic
from .render import count_components, render_fiber, render_parameter_plane, write_ppm
from .sequence import generate_linking_sequence
from .skewdyn import (
    PolyEndo2,
    classify_quadratic_family,
    connectivity_certificate,
    fiber_context,
    green_affine,
    green_fiber,
    homogenize,
)


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GREENLINKER_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


def _complex_arg(s):
    if s is None:
        raise ValidationError("a required point argument is missing (see --help)")
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ValidationError(f"cannot parse complex number {s!r}") from exc


def _load_loop(args, default_fiber=None):
    if args.loop is None:
        raise ValidationError("this command needs --loop FILE (loop JSON)")
    with open(args.loop) as fh:
        obj = json.load(fh)
    return loop_from_dict(obj, default_fiber=default_fiber)


def _resolve_map(args):
    a = _complex_arg(args.a) if getattr(args, "a", None) else None
    return get_map(args.map, a)


def _emit(payload, args, code=0):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _jobspec(args, **extra):
    spec = {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}
    spec.update(extra)
    return {"engine_version": __version__, "jobspec": spec}


def _link_opts(args):
    kw = {}
    if getattr(args, "samples", None):
        kw["initial_samples"] = args.samples
    if getattr(args, "max_depth", None):
        kw["max_depth"] = args.max_depth
    if getattr(args, "extra_depth", None):
        kw["extra_depth"] = args.extra_depth
    return LinkOpts(**kw)


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_green(args):
    f = _resolve_map(args)
    out = _jobspec(args)
    if isinstance(f, PolyEndo2):
        raise ValidationError("green expects a skew product map")
    z = _complex_arg(args.z)
    if args.w is None:
        g = green_poly(f.p, z, args.target_err, args.depth)
        out["green_base"] = g.as_dict()
    else:
        w = _complex_arg(args.w)
        out["green_affine"] = green_affine(f, z, w, args.target_err, args.depth).as_dict()
        ctx = fiber_context(f, z, args.depth)
        out["green_fiber"] = green_fiber(f, ctx, w, args.target_err).as_dict()
    return _emit(out, args)


def cmd_classify(args):
    out = _jobspec(args)
    if args.family == "quadratic":
        a = _complex_arg(args.a)
        out["classification"] = classify_quadratic_family(a, args.max_iter)
        verdict, depth = mandelbrot_member(a, args.max_iter)
        out["mandelbrot"] = {"verdict": verdict, "escape_depth": depth}
    else:
        f = _resolve_map(args)
        if isinstance(f, PolyEndo2):
            raise ValidationError("connectivity classification expects a skew product")
        z0 = _complex_arg(args.fiber)
        cert = connectivity_certificate(f, z0, args.depth, args.target_err)
        out["connectivity"] = cert.as_dict()
    return _emit(out, args)


def cmd_link(args):
    f = _resolve_map(args)
    out = _jobspec(args)
    opts = _link_opts(args)
    if isinstance(f, PolyEndo2) or args.at_infinity:
        endo = f if isinstance(f, PolyEndo2) else homogenize(f)
        loop = _load_loop(args)
        (lk, cert), rest = linking_at_infinity(endo, loop, opts)
        out["restriction"] = rest.as_dict()
        out["lk"] = lk.as_dict()
        out["certificate"] = cert.as_dict()
    elif args.fiber is not None:
        z0 = _complex_arg(args.fiber)
        loop = _load_loop(args, default_fiber=z0)
        ctx = fiber_context(f, z0, max(opts.max_depth + 2, 260))
        lk, cert = linking_fiber(f, ctx, loop, opts)
        out["lk"] = lk.as_dict()
        out["certificate"] = cert.as_dict()
    else:
        raise ValidationError("link needs --fiber Z0 (fiber loop) or --at-infinity")
    return _emit(out, args)


def cmd_lift(args):
    f = _resolve_map(args)
    if isinstance(f, PolyEndo2):
        raise ValidationError("lift expects a skew product")
    z0 = _complex_arg(args.fiber)
    z1 = _complex_arg(args.preimage)
    loop = _load_loop(args, default_fiber=z0)
    bundle = lift_loop(f, z1, loop, _link_opts(args))
    out = _jobspec(args)
    out["bundle"] = bundle.as_dict()
    return _emit(out, args)


def cmd_sequence(args):
    f = _resolve_map(args)
    if isinstance(f, PolyEndo2):
        raise ValidationError("sequence expects a skew product")
    z0 = _complex_arg(args.fiber)
    opts = _link_opts(args)
    if args.loop:
        seed = _load_loop(args, default_fiber=z0)
    else:
        seed = _auto_seed(f, z0, args, opts)
    steps = generate_linking_sequence(f, z0, seed, args.steps, opts=opts)
    out = _jobspec(args)
    out["sequence"] = [s.as_dict() for s in steps]
    out["certifies"] = (
        "nonzero linking numbers arbitrarily close to 0 in Q/Z: the basin of the "
        "point vertically at infinity has infinitely generated first homology"
        if len(steps) == args.steps + 1 else
        "sequence truncated before the requested number of steps; see warnings"
    )
    return _emit(out, args)


def _auto_seed(f, z0, args, opts):
    """Separating-loop seed discovery for `sequence` when --loop is omitted."""
    ctx = fiber_context(f, z0, 260)
    from .render import default_fiber_window
    window = default_fiber_window(f, z0)
    level = args.level
    if level is None:
        # scan downward from the largest fiber critical-point potential
        from .skewdyn import fiber_critical_points
        vals = []
        z = complex(z0)
        for k in range(8):
            sub = fiber_context(f, z, 260)
            for c in fiber_critical_points(f, z):
                g = green_fiber(f, sub, complex(c))
                if g.certified_positive:
                    vals.append(g.value / f.d ** k)
            z = f.p.eval(z)
        if not vals:
            raise ValidationError(
                "no escaping fiber critical point found: no separating seed loop "
                "exists at this fiber (fiber Julia set may be connected)"
            )
        vals = sorted(set(vals), reverse=True)
        level = float(np.sqrt(vals[1] * vals[2])) if len(vals) >= 3 else 0.5 * vals[0]
    found = find_separating_loops(f, level, window, resolution=args.grid,
                                  opts=opts, fiber=z0)
    for lp, lk, _ in found:
        if not lk.is_zero:
            return lp
    raise ValidationError("no separating loop with nonzero linking found at this level")


def cmd_separate(args):
    f = _resolve_map(args)
    out = _jobspec(args)
    window = (_complex_arg(args.center), args.half_extent, args.half_extent)
    opts = _link_opts(args)
    if isinstance(f, PolyEndo2) or args.at_infinity:
        endo = f if isinstance(f, PolyEndo2) else homogenize(f)
        rest = restriction_at_infinity(endo)
        if not rest.is_polynomial:
            raise ValidationError("restriction at infinity is not polynomial")
        found = find_separating_loops(rest.poly, args.level, window,
                                      resolution=args.grid, opts=opts)
    elif args.fiber is not None:
        z0 = _complex_arg(args.fiber)
        found = find_separating_loops(f, args.level, window, resolution=args.grid,
                                      opts=opts, fiber=z0)
    else:
        raise ValidationError("separate needs --fiber Z0 or --at-infinity")
    out["loops"] = [
        {"lk": lk.as_dict(), "certificate": cert.as_dict(), "loop": lp.as_dict()}
        for lp, lk, cert in found
    ]
    return _emit(out, args)


def cmd_render(args):
    out = _jobspec(args)
    threads = _threads(args)
    if args.mode == "fiber":
        f = _resolve_map(args)
        if isinstance(f, PolyEndo2):
            raise ValidationError("fiber render expects a skew product")
        z0 = _complex_arg(args.fiber)
        window = None
        if args.center is not None:
            window = (_complex_arg(args.center), args.half_extent, args.half_extent)
        grid = render_fiber(f, z0, window, args.grid, args.depth, threads)
        cc = count_components(grid, 0)
        out["components"] = {"interior": cc.interior, "boundary_touching": cc.boundary_touching}
    else:
        window = ((-0.75 + 0j), 1.75, 1.25)
        if args.center is not None:
            window = (_complex_arg(args.center), args.half_extent, args.half_extent)
        grid = render_parameter_plane(window, args.grid, args.max_iter, threads)
    path = write_ppm(grid, args.image or "render.ppm")
    out["image"] = path
    out["sidecar"] = path + ".json"
    return _emit(out, args)


def cmd_oracle(args):
    f = _resolve_map(args)
    out = _jobspec(args)
    if isinstance(f, PolyEndo2):
        rest = restriction_at_infinity(f)
        if not rest.is_polynomial:
            raise ValidationError("oracle at infinity needs a polynomial restriction")
        measure = brolin_sample(rest.poly, args.basepoint or
                                4.0 * (1 + max(abs(c) for c in rest.poly.coeffs)),
                                args.depth, args.count, args.seed)
    elif args.fiber is not None:
        z0 = _complex_arg(args.fiber)
        measure = brolin_sample_fiber(f, z0, None, args.depth, args.count, args.seed)
    else:
        raise ValidationError("oracle needs --fiber Z0 or an endomorphism map")
    out["measure"] = measure.as_dict()
    if args.loop:
        loop = _load_loop(args, default_fiber=_complex_arg(args.fiber) if args.fiber else None)
        est = estimate_enclosed_mass(measure, loop)
        out["enclosed_mass"] = est.as_dict()
        d = 2 if not isinstance(f, PolyEndo2) else f.d
        snapped = snap_to_dyadic(est.estimate, est.stderr, d, args.snap_max)
        out["snap_to_dyadic"] = snapped.as_dict() if snapped else None
    return _emit(out, args)


def cmd_selftest(args):
    from . import acceptance
    results = acceptance.run_all(verbose=True, fast=args.fast, stream=sys.stderr)
    out = _jobspec(args)
    out["results"] = [r.as_dict() for r in results]
    ok = all(r.passed for r in results)
    out["all_passed"] = ok
    return _emit(out, args, code=0 if ok else 3)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="greenlinker",
        description="Green's functions, fiber Julia sets and exact mod-1 linking "
                    "numbers for polynomial skew products of the projective plane.",
    )
    ap.add_argument("--version", action="version", version=f"greenlinker {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fiber=True, loop=False, link=False):
        p.add_argument("--map", default="example-0.3",
                       help="built-in map name (see maps module) or 'quadratic'")
        p.add_argument("--a", help="parameter for --map quadratic, e.g. '0.3' or '0.1+0.2i'")
        p.add_argument("--out", help="write the JSON result here instead of stdout")
        p.add_argument("--threads", type=int, help="worker threads (or GREENLINKER_THREADS)")
        if fiber:
            p.add_argument("--fiber", help="base point z0 of the vertical fiber")
        if loop:
            p.add_argument("--loop", help="loop JSON file")
        if link:
            p.add_argument("--samples", type=int, help="initial loop samples")
            p.add_argument("--max-depth", type=int, dest="max_depth")
            p.add_argument("--extra-depth", type=int, dest="extra_depth",
                           help="extra certification depth beyond first full escape")

    p = sub.add_parser("green", help="potentials at a point")
    common(p, fiber=False)
    p.add_argument("--z", required=True)
    p.add_argument("--w", help="fiber coordinate; omit for the base potential only")
    p.add_argument("--target-err", type=float, default=1e-10, dest="target_err")
    p.add_argument("--depth", type=int, default=200)
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("classify", help="connectivity / quadratic-family classification")
    common(p)
    p.add_argument("--family", choices=["quadratic", "skew"], default="skew")
    p.add_argument("--max-iter", type=int, default=2000, dest="max_iter")
    p.add_argument("--depth", type=int, default=60)
    p.add_argument("--target-err", type=float, default=1e-10, dest="target_err")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("link", help="exact linking number of a loop")
    common(p, loop=True, link=True)
    p.add_argument("--at-infinity", action="store_true", dest="at_infinity")
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("lift", help="lift a fiber loop through a base preimage")
    common(p, loop=True, link=True)
    p.add_argument("--preimage", required=True, help="base preimage z1 with p(z1) = z0")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("sequence", help="iterated-preimage linking sequence "
                                        "(infinitely-generated-H1 certificate)")
    common(p, loop=True, link=True)
    p.set_defaults(fiber="0.99999")  # the worked example's fiber
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--level", type=float, help="contour level for automatic seed discovery")
    p.add_argument("--grid", type=int, default=500, help="seed-discovery grid resolution")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("separate", help="find separating loops on a Green level set")
    common(p, link=True)
    p.add_argument("--at-infinity", action="store_true", dest="at_infinity")
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--center", default="0")
    p.add_argument("--half-extent", type=float, default=2.0, dest="half_extent")
    p.add_argument("--grid", type=int, default=500)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("render", help="fiber or parameter-plane raster image (PPM)")
    common(p)
    p.add_argument("--mode", choices=["fiber", "parameter"], default="fiber")
    p.add_argument("--grid", type=int, default=600)
    p.add_argument("--depth", type=int, default=60)
    p.add_argument("--max-iter", type=int, default=500, dest="max_iter")
    p.add_argument("--center")
    p.add_argument("--half-extent", type=float, default=2.0, dest="half_extent")
    p.add_argument("--image", help="output PPM path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="Monte-Carlo measure estimates")
    common(p, loop=True)
    p.add_argument("--depth", type=int, default=24)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--basepoint", type=float)
    p.add_argument("--snap-max", type=int, default=8, dest="snap_max")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    common(p, fiber=False)
    p.add_argument("--fast", action="store_true", help="reduced Monte-Carlo counts")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(json.dumps({"error": {"type": "validation", "message": str(exc)}}))
        return 2
    except Undetermined as exc:
        print(json.dumps({"error": {"type": "undetermined",
                                    "class": type(exc).__name__, "message": str(exc)}}))
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": {"type": "internal",
                                    "class": type(exc).__name__, "message": str(exc)}}))
        return 4


if __name__ == "__main__":
    sys.exit(main())
