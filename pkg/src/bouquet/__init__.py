"""Model dynamics, combinatorics and dynamic rays for the exponential family."""

from .addresses import (
    INFINITY,
    Cmp,
    EventuallyPeriodic,
    Generated,
    Intermediate,
    Orientation,
    cmp_lex,
    count,
    cyclic_triple,
    format_address,
    iterexp,
    parse_address,
)
from .combinatorics import AddressSet, first_difference, nwt_search, triangle_N, unlinked, wandering_candidate
from .itinerary import AddressInterval, Itinerary, itinerary, itinerary_interval, kneading, verify_slow_sharing
from .model import (
    CertInterval,
    Membership,
    ModelPoint,
    SpeedClass,
    Status,
    apply_model,
    classify,
    endpoint_perturbation,
    f_growth,
    f_growth_inv,
    flank_sequences,
    in_J,
    in_J_geq_Q,
    in_subfan,
    t_min,
    t_star,
)
from .rays import (
    RaySample,
    exp_map,
    inverse_branch,
    land_periodic,
    plane_itinerary,
    ray_polyline,
    trace_ray,
    vertical_order_check,
)

__version__ = "0.1.0"
