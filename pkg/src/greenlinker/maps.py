"""Built-in example maps, so scripts and acceptance runs carry no
coefficient typos."""

from .errors import ValidationError
from .linking import polyline_loop
from .numerics import Poly1, Poly2W
from .skewdyn import HomogPoly3, PolyEndo2, SkewProduct

RABBIT_C = complex(0.706260, 0.502896)

# Fiber z0 of the worked quarter-linking example.
FIG2_FIBER = 0.99999


def fig2_loop():
    """Rectangle enclosing exactly the upper-right of the four pieces of the
    fiber filled set of example-0.3 over z0 = 0.99999, threading the escape
    corridors along the coordinate axes (quarter-linking worked example)."""
    return polyline_loop(
        [0.02 + 0.04j, 1.0 + 0.04j, 1.0 + 1.2j, 0.02 + 1.2j],
        ambient="fiber", fiber_base=FIG2_FIBER,
    )


def example_03():
    """(z^2, w^2 + 0.3 z): the quadratic family at a = 0.3."""
    return SkewProduct(Poly1([0, 0, 1]), Poly2W([Poly1([0, 0.3]), Poly1([0]), Poly1([1])]))


def example_jonsson():
    """(z^2 - 2, w^2 + 2(2 - z)): disconnected fiber over z = -2 with
    connected second Julia set."""
    return SkewProduct(Poly1([-2, 0, 1]),
                       Poly2W([Poly1([4, -2]), Poly1([0]), Poly1([1])]))


def example_cantor_pi():
    """(z^2, w^2 + 10 z^2): the restriction to the line at infinity has a
    Cantor Julia set."""
    return SkewProduct(Poly1([0, 0, 1]),
                       Poly2W([Poly1([0, 0, 10]), Poly1([0]), Poly1([1])]))


def quadratic(a):
    """f_a(z, w) = (z^2, w^2 + a z)."""
    return SkewProduct(Poly1([0, 0, 1]),
                       Poly2W([Poly1([0, complex(a)]), Poly1([0]), Poly1([1])]))


def product_squares():
    """(z^2, w^2): fibers are round discs; no separating loop exists."""
    return SkewProduct(Poly1([0, 0, 1]), Poly2W([Poly1([0]), Poly1([0]), Poly1([1])]))


def rabbit_poly():
    """r(z) = z^3 - 0.48 z + (0.706260 + 0.502896 i): one critical point
    escapes, the other lands in an attracting cycle of period 3."""
    return Poly1([RABBIT_C, -0.48, 0, 1])


def rabbit_endo():
    """Degree-3 endomorphism [R(Z,W) : W^3 : T^3] whose restriction to the
    line at infinity is the cubic r (zero perturbation terms)."""
    d = 3
    P = HomogPoly3(d)
    # R(Z, W) = Z^3 - 0.48 Z W^2 + c W^3, as coefficients of Z^i W^j T^{3-i-j}
    P.table[3, 0] = 1
    P.table[1, 2] = -0.48
    P.table[0, 3] = RABBIT_C
    Q = HomogPoly3(d)
    Q.table[0, 3] = 1  # W^3
    return PolyEndo2(P, Q)


BUILTIN_SKEWS = {
    "example-0.3": example_03,
    "example-jonsson": example_jonsson,
    "example-cantor-pi": example_cantor_pi,
    "product": product_squares,
}

BUILTIN_ENDOS = {
    "rabbit-endo": rabbit_endo,
}


def get_map(name, a=None):
    """Resolve a --map argument: a named skew product, 'quadratic' (with a),
    or a named endomorphism."""
    if name == "quadratic":
        if a is None:
            raise ValidationError("map 'quadratic' needs the parameter --a")
        return quadratic(a)
    if name in BUILTIN_SKEWS:
        return BUILTIN_SKEWS[name]()
    if name in BUILTIN_ENDOS:
        return BUILTIN_ENDOS[name]()
    raise ValidationError(
        f"unknown map {name!r}; available: "
        + ", ".join(sorted([*BUILTIN_SKEWS, *BUILTIN_ENDOS, "quadratic"]))
    )
