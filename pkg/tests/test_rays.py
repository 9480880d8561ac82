import cmath
import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import brentq

from bouquet.addresses import Intermediate, parse_address
from bouquet.errors import (
    BoundaryHit,
    DepthInsufficient,
    NotCertified,
    PreconditionFailed,
    SingularValueHit,
)
from bouquet.itinerary import itinerary
from bouquet.model import t_min
from bouquet.rays import (
    RayFailure,
    conjugacy_residual,
    exp_map,
    inverse_branch,
    land_periodic,
    plane_itinerary,
    ray_polyline,
    trace_ray,
    vertical_order_check,
    vertical_order_report,
)

from conftest import TWO_PI, ep_strategy

P = parse_address
finite = st.floats(-30, 30, allow_nan=False)


class TestMaps:
    def test_exp_map(self):
        assert exp_map(0, -2) == -1
        assert exp_map(math.log(2), 0) == pytest.approx(2, abs=1e-15)
        assert exp_map(1j * math.pi, -2) == pytest.approx(-3, abs=1e-15)

    def test_inverse_branch(self):
        assert inverse_branch(-1, -2, 0) == 0
        assert inverse_branch(-1, -2, 1) == pytest.approx(TWO_PI * 1j)
        with pytest.raises(SingularValueHit):
            inverse_branch(-2, -2, 0)

    @given(finite, finite, st.integers(-5, 5))
    def test_round_trip(self, x, y, k):
        w = complex(x, y)
        assume(abs(w + 2) > 1e-6)
        assert abs(exp_map(inverse_branch(w, -2, k), -2) - w) <= 1e-12 * (1 + abs(w))

    def test_branch_strip(self):
        z = inverse_branch(5 + 3j, -2, 2)
        assert (2 * 2 - 1) * math.pi < z.imag <= (2 * 2 + 1) * math.pi


class TestTrace:
    def test_zero_ray_is_real(self):
        r = trace_ray(-2, P("[0]"), 10.0)
        assert abs(r.z.imag) < 1e-9
        assert abs(r.z.real - 10.0) < 1.0
        assert r.residual <= 1e-6

    def test_strip_one(self):
        r = trace_ray(-2, P("[1]"), 10.0)
        assert math.pi < r.z.imag < 3 * math.pi

    def test_not_certified(self):
        with pytest.raises(NotCertified):
            trace_ray(-2, P("[1]"), 2.3)

    def test_depth_insufficient(self):
        with pytest.raises(DepthInsufficient):
            trace_ray(-2, P("[2 -1]"), 6.0, depth=1, tol=1e-14)

    @pytest.mark.parametrize("a", [-2.0, -3.0, 1 + 1j])
    def test_depth_stability(self, a):
        s = P("[1 -2]")
        r = trace_ray(a, s, 12.0, depth=20)
        r5 = trace_ray(a, s, 12.0, depth=25)
        assert abs(r.z - r5.z) <= r.residual

    @given(ep_strategy(2, 1, 3), st.floats(8, 20))
    def test_conjugacy(self, s, t):
        assert conjugacy_residual(-2, s, t) < 1e-12

    def test_auto_depth(self):
        r = trace_ray(-2, P("[0]"), 10.0, depth=None)
        assert r.residual <= 1e-6 and r.depth >= 1


class TestPolyline:
    def test_zero_ray(self):
        out = ray_polyline(-2, P("[0]"), 5.0, 15.0, 11)
        assert len(out) == 11 and not any(isinstance(x, RayFailure) for x in out)
        re = [x.z.real for x in out]
        assert all(u < v for u, v in zip(re, re[1:]))

    def test_single_point(self):
        assert len(ray_polyline(-2, P("[0]"), 7.0, 7.0, 5)) == 1

    def test_low_potentials_rejected(self):
        out = ray_polyline(-2, P("[1]"), 1.0, 10.0, 4)
        assert isinstance(out[0], RayFailure) and out[0].error == "NotCertified"
        assert not isinstance(out[-1], RayFailure)

    @given(ep_strategy(2, 1, 3))
    def test_real_part_grows(self, s):
        out = ray_polyline(-3, s, 10.0, 20.0, 6)
        re = [x.z.real for x in out]
        assert all(u < v for u, v in zip(re, re[1:]))


class TestVerticalOrder:
    def test_examples(self):
        addrs = [P("[0]"), P("[1]"), P("[2]")]
        assert vertical_order_check(-2, addrs, 10.0)
        assert vertical_order_check(-2, addrs[::-1], 10.0)
        assert vertical_order_check(-2, addrs[:1], 10.0)

    def test_close_addresses(self):
        addrs = [P("0 0 [1]"), P("0 0 [-1]"), P("0 1 [0]"), P("0 [0]")]
        rep = vertical_order_report(1 + 1j, addrs, 10.0)
        assert rep.ok and rep.pairs == 6


class TestPlaneItinerary:
    def test_real_axis(self):
        assert plane_itinerary(-2, 0.3, 6) == [0] * 6

    def test_first_strip(self):
        assert plane_itinerary(-2, 5 + TWO_PI * 1j, 1) == [1]

    def test_boundary(self):
        with pytest.raises(BoundaryHit):
            plane_itinerary(-2, 1 + 1j * math.pi, 1)

    def test_parameter_domain(self):
        with pytest.raises(ValueError):
            plane_itinerary(-0.5, 1.0, 2)

    def test_matches_combinatorics(self):
        s = P("[1 0]")
        part = Intermediate((), -1)
        r = trace_ray(-2, s, 8.0)
        # at t = 8 the orbit leaves double range after two steps
        assert plane_itinerary(-2, r.z, 2) == list(itinerary(part, s, 2).entries)
        r = trace_ray(-2, s, t_min(s, 1e-12).hi + 1e-8, depth=None, Q=0.0)
        assert plane_itinerary(-2, r.z, 10) == list(itinerary(part, s, 10).entries)


class TestLanding:
    def test_real_fixed_point(self):
        root = brentq(lambda x: math.exp(x) - 2 - x, 0.5, 3.0, xtol=1e-15)
        lp = land_periodic(-2, P("[0]"))
        assert abs(lp.z - root) < 1e-9
        assert lp.multiplier > 1

    def test_strip_one(self):
        lp = land_periodic(-2, P("[1]"))
        assert math.pi < lp.z.imag < 3 * math.pi
        assert abs(cmath.exp(lp.z) - 2 - lp.z) < 1e-10
        assert lp.multiplier > 1

    def test_period_two(self):
        lp = land_periodic(-2, P("[1 -1]"))
        assert lp.period == 2 and lp.residual <= 1e-10 and lp.multiplier > 1

    def test_not_periodic(self):
        with pytest.raises(PreconditionFailed):
            land_periodic(-2, P("1 [0]"))
