from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bouquet.addresses import (
    INFINITY,
    Cmp,
    EventuallyPeriodic,
    Intermediate,
    Orientation,
    cmp_lex,
    count,
    cyclic_triple,
    format_address,
    iterexp,
    lex_less,
    parse_address,
    prepend,
)
from bouquet.errors import AddressSyntaxError, UndecidedAtDepth
from bouquet.magnitude import Tower

from conftest import ep_strategy, intermediate_strategy

P = parse_address


def prefix(a, n):
    return [a.entry(i) for i in range(n)]


class TestParsing:
    def test_bracket_and_power_forms_agree(self):
        assert P("3 [1 2]") == P("3 (1 2)^inf")
        assert prefix(P("3 [1 2]"), 6) == [3, 1, 2, 1, 2, 1]

    def test_canonical_form_absorbs_preperiod(self):
        assert P("1 2 [1 2]") == P("[1 2]")
        assert P("[1 2 1 2]") == P("[1 2]")
        assert str(EventuallyPeriodic((1, 1, 1), (2,))) == "1 1 1 [2]"

    def test_intermediate(self):
        s = P("5 1/2 inf")
        assert isinstance(s, Intermediate)
        assert s.length == 3
        assert s.entry(1) == Fraction(1, 2)
        assert s.shift(2) is INFINITY

    def test_infinity(self):
        assert P("inf") is INFINITY

    def test_generated(self):
        g = P("gen:iterexp:1")
        assert prefix(g, 5) == [1, 2, 4, 16, 65536]
        assert isinstance(g.entry(6), Tower)
        assert P("gen:count:3@2").entry(0) == 5

    @pytest.mark.parametrize("bad, pos", [("(1 2", 4), ("1 x 2", 2), ("1/2 3 inf", 0)])
    def test_errors_report_position(self, bad, pos):
        with pytest.raises(AddressSyntaxError) as ei:
            P(bad)
        assert ei.value.position == pos

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            iterexp(-1)

    @given(ep_strategy())
    def test_round_trip_ep(self, a):
        assert P(format_address(a)) == a

    @given(intermediate_strategy())
    def test_round_trip_intermediate(self, a):
        assert P(format_address(a)) == a


class TestOperations:
    def test_shift_translate_prepend(self):
        a = P("3 [1 2]")
        assert a.shift(1) == P("[1 2]")
        assert a.translate(-3) == P("0 [1 2]")
        assert prepend(7, a) == P("7 3 [1 2]")

    def test_prepend_to_ends(self):
        assert prepend(2, None) == P("3/2 inf")
        assert prepend(2, INFINITY) == P("5/2 inf")

    def test_replace(self):
        assert str(P("[0 0 1]").replace(1, 5)) == "0 5 [1 0 0]"

    @given(ep_strategy(), st.integers(0, 12))
    def test_shift_entries(self, a, k):
        assert prefix(a.shift(k), 8) == [a.entry(k + i) for i in range(8)]


class TestOrder:
    def test_examples(self):
        assert cmp_lex(P("[1]"), P("[2]")) is Cmp.LESS
        assert cmp_lex(P("[1 2]"), P("1 2 [1 2]")) is Cmp.EQUAL
        assert cmp_lex(P("1 [0]"), P("1 1/2 inf")) is Cmp.LESS
        assert cmp_lex(P("1 [5]"), P("1 1/2 inf")) is Cmp.GREATER
        assert cmp_lex(P("[1]"), INFINITY) is Cmp.LESS

    def test_intermediate_fills_gap(self):
        # everything starting with 0 lies below 1/2 inf, everything starting with 1 above
        gap = P("1/2 inf")
        assert lex_less(P("0 [100]"), gap) and lex_less(gap, P("1 [-100]"))

    def test_generated_undecided(self):
        a, b = iterexp(1), iterexp(1)
        assert cmp_lex(a, b) is Cmp.UNDECIDED
        with pytest.raises(UndecidedAtDepth):
            lex_less(count(0), count(0))
        assert cmp_lex(count(0), count(1)) is Cmp.LESS

    @given(ep_strategy(3, 2, 3), ep_strategy(3, 2, 3))
    def test_antisymmetry(self, a, b):
        flip = {Cmp.LESS: Cmp.GREATER, Cmp.GREATER: Cmp.LESS, Cmp.EQUAL: Cmp.EQUAL}
        assert cmp_lex(b, a) is flip[cmp_lex(a, b)]

    @given(ep_strategy(2, 2, 3), ep_strategy(2, 2, 3), ep_strategy(2, 2, 3))
    def test_transitivity(self, a, b, c):
        if lex_less(a, b) and lex_less(b, c):
            assert lex_less(a, c)

    @given(ep_strategy(3, 2, 3), st.integers(-5, 5))
    def test_translation_monotone(self, a, m):
        if m > 0:
            assert lex_less(a, a.translate(m))

    def test_cyclic_triple(self):
        a, b, c = P("[0]"), P("[1]"), P("[2]")
        assert cyclic_triple(a, b, c) is Orientation.POSITIVE
        assert cyclic_triple(b, c, a) is Orientation.POSITIVE
        assert cyclic_triple(a, c, b) is Orientation.NEGATIVE
        assert cyclic_triple(a, a, b) is Orientation.DEGENERATE

    @given(ep_strategy(3, 1, 2), ep_strategy(3, 1, 2), ep_strategy(3, 1, 2))
    def test_cyclic_rotation_invariant(self, a, b, c):
        assert cyclic_triple(a, b, c) is cyclic_triple(b, c, a)
