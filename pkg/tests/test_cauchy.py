from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import long_division, state_value
from qframes.cauchy import (
    Status,
    alternating,
    canonical,
    cauchy_prob,
    cauchy_test,
    constant,
    equivalent,
    p_candidates,
    real_convert_base,
    real_from_numeral,
    real_from_sequence,
    superposed,
    truncation,
)
from qframes.errors import NotCauchy
from qframes.numeral import NumeralState, eq_arith, format_compact, is_initial_part, parse_compact, value

HALF = 2 ** -0.5


def brute_status(vals, k, ell_max, p_max):
    """Same window rule as the engine, evaluated on Fraction values only."""
    def tail_ok(ell, p):
        tail = vals[p + 1: p_max + 1]
        return all(abs(a - b) <= Fraction(1, k ** ell) for a, b in combinations(tail, 2))

    failed = []
    for ell in range(1, ell_max + 1):
        if not any(tail_ok(ell, p) for p in p_candidates(p_max)):
            failed.append(ell)
    return failed


def brute_prob(terms, k, ell_max, p_max):
    """terms: list of [(value, weight)] with weights summing to 1."""
    def pair(j, h, ell):
        return sum(wa * wb for va, wa in terms[j] for vb, wb in terms[h] if abs(va - vb) <= Fraction(1, k ** ell))

    return min(
        max(min(pair(j, h, ell) for j in range(p + 1, p_max + 1) for h in range(p + 1, p_max + 1))
            for p in p_candidates(p_max))
        for ell in range(1, ell_max + 1)
    )


class TestVerdicts:
    def test_third_passes_with_identity_modulus(self):
        v = cauchy_test(truncation(Fraction(1, 3), 2), 8, 32)
        assert v.status is Status.PASS
        assert v.moduli == {ell: ell for ell in range(1, 9)}
        assert v.modulus_declared

    def test_alternating_fails_from_first_ell(self):
        seq = alternating(parse_compact("0+", 2), parse_compact("1+", 2))
        v = cauchy_test(seq, 8, 32)
        assert v.status is Status.FAIL
        assert v.failed_ells[0] == 1

    def test_constant(self):
        v = cauchy_test(constant(parse_compact("13-47", 10)), 5, 10)
        assert v.status is Status.PASS
        assert v.worst_deviation == 0

    def test_late_settling_is_inconclusive(self):
        from qframes.cauchy import NumeralSequence

        one, zero = parse_compact("1+", 2), parse_compact("0+", 2)
        seq = NumeralSequence(2, lambda n: zero if n < 20 or n % 2 else one)
        assert cauchy_test(seq, 4, 32).status is Status.FAIL
        settle = NumeralSequence(2, lambda n: (zero if n % 2 else one) if n < 20 else zero)
        assert cauchy_test(settle, 4, 32).status is Status.INCONCLUSIVE

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-6, 6), min_size=13, max_size=13), st.integers(1, 4))
    def test_undeclared_matches_brute_force(self, nums, ell_max):
        from qframes.cauchy import NumeralSequence
        from qframes.numeral import encode

        states = [encode(Fraction(x, 8), 2) for x in nums]
        seq = NumeralSequence(2, lambda n: states[n])
        v = cauchy_test(seq, ell_max, 12)
        vals = [state_value(s) for s in states]
        unmet = brute_status(vals, 2, ell_max, 12)
        # unmet ells are FAIL only when the window's last pair still violates the bound
        hard = [ell for ell in unmet if abs(vals[12] - vals[11]) > Fraction(1, 2 ** ell)]
        assert list(v.failed_ells) == hard
        if hard:
            assert v.status is Status.FAIL
        elif unmet:
            assert v.status is Status.INCONCLUSIVE
        else:
            assert v.status is Status.PASS


class TestProbability:
    def test_mixed_branches_quarter(self):
        conv = truncation(Fraction(1, 3), 2)
        alt = alternating(parse_compact("0+", 2), parse_compact("1+", 2))
        seq = superposed([HALF, HALF], [conv, alt])
        est = cauchy_prob(seq, 8, 32)
        terms = [[(state_value(conv.state(n)), 0.5), (state_value(alt.state(n)), 0.5)] for n in range(33)]
        assert est.estimate == pytest.approx(0.25, abs=1e-12)
        assert est.estimate == pytest.approx(brute_prob(terms, 2, 8, 32), abs=1e-12)

    def test_basis_cauchy_is_one(self):
        assert cauchy_prob(truncation(Fraction(2, 7), 3), 4, 16).estimate == pytest.approx(1.0)


class TestEquivalence:
    def test_padding_equivalent(self):
        a = truncation(Fraction(1, 3), 2)
        b = truncation(Fraction(1, 3), 2, extra_zeros=3)
        assert equivalent(a, b, 8, 32).status is Status.PASS

    def test_distinct_limits(self):
        v = equivalent(truncation(Fraction(1, 3), 2), constant(parse_compact("0+", 2)), 8, 32)
        assert v.status is Status.FAIL
        assert v.failed_ells[0] == 2  # |1/3| <= 1/2 still holds at ell = 1


class TestCanonical:
    @pytest.mark.parametrize("v,k", [(Fraction(1, 3), 2), (Fraction(2, 7), 10), (Fraction(-5, 6), 3)])
    def test_digits_match_long_division(self, v, k):
        seq = truncation(v, k)
        for n in (1, 4, 8):
            s = canonical(seq, n)
            frac = list(reversed(s.digits[: s.m]))
            assert frac == long_division(v, k, n)
            assert s.gamma == ("-" if v < 0 else "+")

    def test_third_base2(self):
        assert format_compact(canonical(truncation(Fraction(1, 3), 2), 6)) == "+010101"

    def test_prefix_property(self):
        rep = real_from_sequence(truncation(Fraction(1, 3), 2))
        assert rep.check_prefix(8)

    def test_constant_is_padded(self):
        s = canonical(constant(parse_compact("13-47", 10)), 4)
        assert format_compact(s) == "13-4700"
        assert eq_arith(s, parse_compact("13-47", 10))

    def test_alternating_not_cauchy(self):
        with pytest.raises(NotCauchy):
            canonical(alternating(parse_compact("0+", 2), parse_compact("1+", 2)), 3)


class TestRealReps:
    def test_numeral_rep(self):
        rep = real_from_numeral(parse_compact("013-470", 10))
        assert rep.constant
        assert rep.approx(1) == Fraction(-134, 10)

    def test_convert_periodic(self):
        rep = real_convert_base(parse_compact("+5", 10), 3)
        assert not rep.constant
        for n in range(1, 12):
            s = rep.prefix(n)
            assert list(reversed(s.digits[: s.m])) == long_division(Fraction(1, 2), 3, n)
        assert rep.check_prefix(10)

    def test_convert_finite(self):
        rep = real_convert_base(parse_compact("+1", 2), 10)
        assert rep.constant and value(rep.prefix(3)) == Fraction(1, 2)
