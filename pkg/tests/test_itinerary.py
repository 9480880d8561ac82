import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bouquet.addresses import INFINITY, Cmp, Intermediate, cmp_lex, parse_address
from bouquet.combinatorics import first_difference
from bouquet.errors import EmptyRealization, HitsPartition, PreconditionFailed
from bouquet.itinerary import (
    FULL_LINE,
    AddressInterval,
    Itinerary,
    itinerary,
    itinerary_interval,
    kneading,
    slot,
    verify_slow_sharing,
)
from bouquet.sampling import random_ep, sample_between
from bouquet.suites import _address_pool, sharing_pairs

from conftest import ep_strategy, intermediate_strategy

P = parse_address


def entries(s, r, n):
    return list(itinerary(s, r, n).entries)


class TestItinerary:
    def test_examples(self):
        assert entries(P("[1]"), P("[2]"), 4) == [1, 1, 1, 1]
        assert entries(P("[0 1]"), P("[1 0]"), 1) == [0]

    def test_hits_partition(self):
        with pytest.raises(HitsPartition) as ei:
            itinerary(P("[0]"), P("[0]"), 1)
        assert ei.value.index == 0
        with pytest.raises(HitsPartition) as ei:
            itinerary(P("[0 1]"), P("[1 0]"), 2)
        assert ei.value.index == 1

    def test_slot_brute_force(self):
        s, x = P("3 [1 -2]"), P("7 [0]")
        m = slot(s, x)
        assert cmp_lex(s.translate(m), x) is Cmp.LESS
        assert cmp_lex(x, s.translate(m + 1)) is Cmp.LESS

    def test_intermediate_partition(self):
        s = Intermediate((), -1)
        assert entries(s, P("[-2 0 3]"), 3) == [-2, 0, 3]

    def test_str_and_dict(self):
        it = Itinerary((1, 1), True, 4)
        assert str(it) == "1 1 *"
        assert it.to_dict() == {"entries": [1, 1], "star_terminated": True, "requested_length": 4}
        with pytest.raises(ValueError):
            Itinerary((1, 2), True, 2)

    @given(ep_strategy(4, 2, 3), ep_strategy(6, 2, 3), st.integers(2, 8))
    def test_shift_compatibility(self, s, r, n):
        try:
            full = entries(s, r, n)
        except HitsPartition:
            assume(False)
        assert entries(s, r.shift(1), n - 1) == full[1:]

    @given(ep_strategy(4, 2, 3), ep_strategy(6, 2, 3), st.integers(-5, 5))
    def test_translate_moves_first_slot(self, s, r, m):
        try:
            a, b = entries(s, r, 1), entries(s, r.translate(m), 1)
        except HitsPartition:
            assume(False)
        assert b[0] - a[0] == m


class TestKneading:
    def test_period_one(self):
        k = kneading(P("[1]"), 4)
        assert k.entries == () and k.star_terminated and str(k) == "*"

    def test_period_two(self):
        k = kneading(P("[1 2]"), 4)
        assert len(k.entries) == 1 and k.star_terminated
        assert k.entries[0] == slot(P("[1 2]"), P("[2 1]"))

    @given(ep_strategy(5, 0, 5))
    def test_periodic_count(self, s):
        n = len(s.per)
        k = kneading(s, n + 3)
        assert k.star_terminated and len(k.entries) == n - 1

    def test_intermediate(self):
        s = P("1 1/2 inf")
        assert str(kneading(s, 5)) == "-1 *"
        assert str(kneading(s, 5, "prefixed")) == "0 -1 *"

    @given(intermediate_strategy())
    def test_intermediate_counts(self, s):
        a = kneading(s, 20)
        b = kneading(s, 20, "prefixed")
        assert len(a.entries) == s.length - 2
        assert len(b.entries) == s.length - 1

    def test_not_periodic_runs_full(self):
        k = kneading(P("2 1 [0]"), 5)
        assert not k.star_terminated and len(k.entries) == 5

    def test_bad_convention(self):
        with pytest.raises(ValueError):
            kneading(P("[1]"), 3, "other")


class TestCylinders:
    def test_empty_prefix(self):
        assert itinerary_interval(P("[1]"), []) == [FULL_LINE]

    def test_one_step(self):
        (iv,) = itinerary_interval(P("[1]"), [1])
        assert (iv.lower, iv.upper) == (P("2 [1]"), P("3 [1]"))
        (iv,) = itinerary_interval(P("[1]"), [1, 1])
        assert (iv.lower, iv.upper) == (P("2 2 [1]"), P("2 3 [1]"))

    def test_refinement(self):
        (outer,) = itinerary_interval(P("[1]"), [1])
        inner = itinerary_interval(P("[1]"), [1, 1])
        for iv in inner:
            assert cmp_lex(outer.lower, iv.lower) is not Cmp.GREATER
            assert cmp_lex(iv.upper, outer.upper) is not Cmp.GREATER
        assert not (len(inner) == 1 and inner[0] == outer)

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            AddressInterval(P("[2]"), P("[1]"))

    @given(ep_strategy(4, 1, 3), st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.randoms())
    def test_consistency(self, s, prefix, rnd):
        try:
            ivs = itinerary_interval(s, prefix)
        except EmptyRealization:
            assume(False)
        rng = random.Random(rnd.random())
        for iv in ivs:
            for _ in range(3):
                r = sample_between(iv.lower, iv.upper, rng)
                try:
                    assert entries(s, r, len(prefix)) == prefix
                except HitsPartition:
                    pass

    @given(ep_strategy(4, 1, 3), st.integers(1, 3), st.randoms())
    def test_distinct_prefixes_disjoint(self, s, n, rnd):
        rng = random.Random(rnd.random())
        p1 = [rng.randint(-2, 2) for _ in range(n)]
        p2 = [rng.randint(-2, 2) for _ in range(n)]
        assume(p1 != p2)
        try:
            a, b = itinerary_interval(s, p1), itinerary_interval(s, p2)
        except EmptyRealization:
            assume(False)
        for x in a:
            for y in b:
                # open intervals: one must end before the other starts
                assert _le(x.upper, y.lower) or _le(y.upper, x.lower)


def _le(a, b):
    if a is None or b is INFINITY:
        return a is None or b is INFINITY
    if b is None or a is INFINITY:
        return False
    return cmp_lex(a, b) is not Cmp.GREATER


class TestSharing:
    def _pairs(self, seed, n):
        rng = random.Random(seed)
        pool = _address_pool(3, 2, 2)
        out = []
        while len(out) < n:
            s = random_ep(rng, 6, 1, 3)
            out.extend((s, r1, r2) for r1, r2 in sharing_pairs(s, pool, 4))
        return out[:n]

    def test_restriction(self):
        # after the first address difference, itinerary entries come from the kneading sequence
        for s, r1, r2 in self._pairs(11, 300):
            K = kneading(s, 30).entries
            j = first_difference(r1, r2)
            it = entries(s, r1, j + 10)
            for k in range(1, 10):
                assert it[j + k] in K[: k + 1]

    def test_slow(self):
        for s, r1, r2 in self._pairs(5, 30):
            assert verify_slow_sharing(s, r1, r2, 10).holds

    def test_equal_addresses(self):
        with pytest.raises(PreconditionFailed):
            verify_slow_sharing(P("[1]"), P("[2]"), P("[2]"), 5)

    def test_differing_itineraries(self):
        with pytest.raises(PreconditionFailed):
            verify_slow_sharing(P("[1]"), P("[2]"), P("[5]"), 5)
