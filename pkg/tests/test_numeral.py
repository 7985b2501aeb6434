from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import digits_value, finite_in_base, long_division, state_value, text_value
from qframes.errors import BaseMismatch, CannotAlign, InvalidState, NotRepresentable, ParseError
from qframes.numeral import (
    ComplexNumeral,
    NumeralState,
    PeriodicExpansion,
    abs_A,
    add_A,
    all_states,
    cmp_A,
    convert_base,
    encode,
    eq_arith,
    format_compact,
    is_initial_part,
    le_A,
    negate,
    pad,
    parse_compact,
    pred_ulp,
    representable,
    sub_A,
    succ_ulp,
    trim,
    truncate_fraction,
    value,
)


def P(text, k=10):
    return parse_compact(text, k)


@st.composite
def states(draw, k=None, max_len=6):
    k = k or draw(st.integers(2, 12))
    L = draw(st.integers(0, max_len))
    digits = tuple(draw(st.lists(st.integers(0, k - 1), min_size=L, max_size=L)))
    m = draw(st.integers(0, L))
    return NumeralState(k, draw(st.sampled_from("+-")), digits, m)


class TestCompactForm:
    @pytest.mark.parametrize("text,val", [
        ("3720+", Fraction(3720)),
        ("-0474", Fraction(-474, 10000)),
        ("12-71", Fraction(-1271, 100)),
        ("0+", Fraction(0)),
        ("+5", Fraction(1, 2)),
    ])
    def test_literals(self, text, val):
        s = P(text)
        assert value(s) == val == text_value(text, 10)
        assert format_compact(s) == text

    def test_shape_of_12_71(self):
        s = P("12-71")
        assert (s.L, s.m, s.gamma, s.digits) == (4, 2, "-", (1, 7, 2, 1))

    def test_unicode_minus(self):
        assert P("12−71") == P("12-71")

    @pytest.mark.parametrize("bad", ["1271", "1+2-3", "12a+", ""])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            P(bad)

    def test_digit_beyond_base(self):
        with pytest.raises(ParseError):
            parse_compact("12+", 2)

    @given(states())
    def test_round_trip(self, s):
        assert parse_compact(format_compact(s), s.k) == s

    def test_record_round_trip(self):
        s = P("013-470")
        assert NumeralState.from_record(s.to_record()) == s


class TestValidation:
    def test_bad_digit(self):
        with pytest.raises(InvalidState):
            NumeralState(2, "+", (2,), 0)

    def test_bad_m(self):
        with pytest.raises(InvalidState):
            NumeralState(10, "+", (1, 2), 3)

    def test_bad_sign(self):
        with pytest.raises(InvalidState):
            NumeralState(10, "*", (1,), 0)

    def test_bad_base(self):
        with pytest.raises(InvalidState):
            NumeralState(1, "+", (0,), 0)


class TestEncode:
    def test_half(self):
        assert format_compact(encode(Fraction(1, 2), 10)) == "+5"

    def test_zero(self):
        assert format_compact(encode(0, 7)) == "0+"

    def test_third_not_representable(self):
        assert not representable(Fraction(1, 3), 10)
        with pytest.raises(NotRepresentable):
            encode(Fraction(1, 3), 10)

    @given(st.integers(-10**6, 10**6), st.integers(0, 6), st.integers(2, 12))
    def test_round_trip(self, num, e, k):
        v = Fraction(num, k ** e)
        s = encode(v, k)
        assert state_value(s) == v
        assert trim(s) == s

    @given(st.fractions(max_denominator=500), st.integers(2, 12))
    def test_representable_matches_prime_oracle(self, v, k):
        assert representable(v, k) == finite_in_base(v, k)


class TestTrimPad:
    def test_trim_padded_pair(self):
        assert format_compact(trim(P("013-470"))) == "13-47"

    def test_pad(self):
        assert format_compact(pad(P("13-47"), 6, 3)) == "013-470"
        assert format_compact(pad(parse_compact("1+", 2), 3, 1)) == "01+0"

    def test_pad_too_short(self):
        with pytest.raises(CannotAlign):
            pad(P("13-47"), 3, 1)

    @given(states(), st.integers(0, 3), st.integers(0, 3))
    def test_pad_preserves_value(self, s, extra_int, extra_frac):
        t = trim(s)
        p = pad(t, t.L + extra_int + extra_frac, t.m + extra_frac)
        assert state_value(p) == state_value(s)
        assert trim(p) == t

    def test_padded_states_orthogonal_but_equal(self):
        a, b = P("013-470"), P("13-47")
        assert a != b
        assert eq_arith(a, b)


def _exhaustive(k, L_max=4):
    return [s for L in range(L_max + 1) for s in all_states(k, L)]


class TestArithmeticExhaustive:
    """Pairs over all states of small shapes, checked against Fraction arithmetic.

    The full L <= 4 sweep lives in the acceptance suite.
    """

    @pytest.mark.parametrize("k", [2, 3])
    def test_unary(self, k):
        for s in _exhaustive(k):
            v = state_value(s)
            assert value(s) == v
            assert encode(v, k) == trim(s)
            assert state_value(abs_A(s)) == abs(v)
            assert state_value(negate(s)) == -v

    def test_binary_k2_all_pairs(self):
        S = _exhaustive(2, 3)
        vals = [state_value(s) for s in S]
        for a, va in zip(S, vals):
            for b, vb in zip(S, vals):
                assert state_value(add_A(a, b)) == va + vb
                assert state_value(sub_A(a, b)) == va - vb
                assert cmp_A(a, b) == (va > vb) - (va < vb)

    def test_binary_k3_same_shape(self):
        for L in range(4):
            for m in range(L + 1):
                S = list(all_states(3, L, m))
                vals = [state_value(s) for s in S]
                for a, va in zip(S, vals):
                    for b, vb in zip(S, vals):
                        assert state_value(add_A(a, b)) == va + vb
                        assert state_value(sub_A(a, b)) == va - vb
                        assert cmp_A(a, b) == (va > vb) - (va < vb)

    @given(states(), states())
    def test_mixed_bases_rejected(self, a, b):
        if a.k == b.k:
            return
        with pytest.raises(BaseMismatch):
            add_A(a, b)

    @settings(max_examples=300)
    @given(st.integers(2, 12).flatmap(lambda k: st.tuples(states(k=k, max_len=8), states(k=k, max_len=8))))
    def test_random_pairs(self, ab):
        a, b = ab
        va, vb = state_value(a), state_value(b)
        assert state_value(add_A(a, b)) == va + vb
        assert state_value(sub_A(a, b)) == va - vb
        assert le_A(a, b) == (va <= vb)
        assert eq_arith(a, b) == (va == vb)


class TestUlp:
    def test_binary_carry(self):
        s = parse_compact("100+111", 2)
        assert format_compact(succ_ulp(s)) == "101+000"

    def test_carry_out_grows(self):
        assert format_compact(succ_ulp(parse_compact("2+", 3))) == "10+"

    def test_below_zero(self):
        assert format_compact(pred_ulp(P("0+"))) == "1-"

    @given(states())
    def test_step_is_one_ulp(self, s):
        ulp = Fraction(1, s.k ** s.m)
        up, down = succ_ulp(s), pred_ulp(s)
        assert state_value(up) == state_value(s) + ulp
        assert state_value(down) == state_value(s) - ulp
        assert up.m == s.m and down.m == s.m
        assert up.L >= s.L

    @given(states())
    def test_inverse(self, s):
        assert eq_arith(pred_ulp(succ_ulp(s)), s)


class TestPrefixes:
    def test_truncate(self):
        s = P("12-71")
        assert format_compact(truncate_fraction(s, 1)) == "12-7"
        assert format_compact(truncate_fraction(s, 3)) == "12-710"

    @given(states(max_len=8), st.integers(0, 5), st.integers(0, 5))
    def test_shorter_is_initial_part(self, s, n, extra):
        a, b = truncate_fraction(s, n), truncate_fraction(s, n + extra)
        assert is_initial_part(a, b)


class TestConvert:
    def test_sixth_decimal(self):
        out = convert_base(encode(Fraction(1, 6), 2 * 3), 10)
        assert isinstance(out, PeriodicExpansion)
        assert out.preperiod == (1,) and out.period == (6,)
        assert str(out) == "0.1(6)"

    def test_same_base_trims(self):
        assert convert_base(P("013-470"), 10) == P("13-47")

    def test_finite(self):
        out = convert_base(parse_compact("+1", 2), 10)
        assert out == P("+5")

    @settings(max_examples=200)
    @given(st.integers(-500, 500), st.integers(1, 4), st.integers(2, 12), st.integers(2, 12))
    def test_against_oracle(self, num, e, k, k2):
        v = Fraction(num, k ** e)
        out = convert_base(encode(v, k), k2)
        if finite_in_base(v, k2):
            assert isinstance(out, NumeralState) and state_value(out) == v
        else:
            assert isinstance(out, PeriodicExpansion)
            assert out.value() == v
            n = len(out.preperiod) + 2 * len(out.period)
            assert [out.fractional_digit(i) for i in range(n)] == long_division(v, k2, n)


class TestComplex:
    def test_base_mismatch(self):
        with pytest.raises(BaseMismatch):
            ComplexNumeral(P("1+"), parse_compact("1+", 2))


def test_all_states_count():
    for k, L in product((2, 3), range(4)):
        assert len(list(all_states(k, L))) == 2 * (L + 1) * k ** L
    assert digits_value(2, "-", (1, 1), 1) == Fraction(-3, 2)
