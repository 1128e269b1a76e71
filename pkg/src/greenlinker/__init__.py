"""greenlinker: Green's functions, fiber Julia sets, harmonic-measure
restrictions and exact mod-1 linking numbers for polynomial endomorphisms
and polynomial skew products of the complex projective plane, with
certificate generators for Fatou basins with nontrivial (and infinitely
generated) first homology."""

__version__ = "0.1.0"

from .dynamics1d import (
    CriticalReport,
    GreenValue,
    RestrictionAtInfinity,
    critical_report,
    green_poly,
    mandelbrot_member,
    restriction_at_infinity,
)
from .linking import (
    LiftBundle,
    LinkOpts,
    Mod1Rational,
    OrientedLoop,
    WindingCertificate,
    circle_loop,
    count_enclosed_critical_values,
    lift_loop,
    linking_at_infinity,
    linking_fiber,
    linking_poly_1d,
    loop_from_dict,
    point_loop,
    polyline_loop,
    push_forward_loop,
)
from .contours import find_separating_loops
from .numerics import (
    ErrBound,
    Poly1,
    Poly2W,
    escape_radius,
    escape_radius_fiberwise,
    poly1,
    poly2w,
    roots,
)
from .oracle import (
    EmpiricalMeasure,
    brolin_sample,
    brolin_sample_fiber,
    estimate_enclosed_mass,
    snap_to_dyadic,
)
from .render import ImageGrid, count_components, render_fiber, render_parameter_plane, write_ppm
from .sequence import generate_linking_sequence, largest_modulus_preimage
from .skewdyn import (
    ConnectivityCertificate,
    FiberContext,
    PolyEndo2,
    SkewProduct,
    classify_quadratic_family,
    connectivity_certificate,
    dehomogenize,
    fiber_context,
    fiber_critical_points,
    green_affine,
    green_fiber,
    homogenize,
)
