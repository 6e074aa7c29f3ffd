from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import uhatkit as uk
from uhatkit.errors import DimensionError, ParseError

from oracles import add_reduced, naive_bits


def F(*args):
    return Fraction(*args)


class TestAffineApply:
    def test_identity(self):
        m = uk.AffineMap.identity(2)
        x = uk.rvec([F(1, 2), F(3)])
        assert uk.affine_apply(m, x) == x

    def test_zero_matrix_returns_bias(self):
        m = uk.AffineMap.from_rows([[0, 0], [0, 0]], [2, -1])
        for x in ([0, 0], [5, 7], [F(-1, 3), F(9)]):
            assert uk.affine_apply(m, uk.rvec(x)) == uk.rvec([2, -1])

    def test_hand_checked_example(self):
        m = uk.AffineMap.from_rows([[1, 2], [3, 4]], [0, 1])
        assert uk.affine_apply(m, uk.rvec([1, 1])) == uk.rvec([3, 8])

    def test_width_mismatch(self):
        m = uk.AffineMap.identity(2)
        with pytest.raises(DimensionError):
            uk.affine_apply(m, uk.rvec([1, 2, 3]))

    @given(st.data())
    def test_linearity(self, data):
        n = data.draw(st.integers(1, 3))
        small = st.integers(-5, 5)
        rows = data.draw(st.lists(st.lists(small, min_size=n, max_size=n),
                                  min_size=n, max_size=n))
        bias = data.draw(st.lists(small, min_size=n, max_size=n))
        x = uk.rvec(data.draw(st.lists(small, min_size=n, max_size=n)))
        y = uk.rvec(data.draw(st.lists(small, min_size=n, max_size=n)))
        m = uk.AffineMap.from_rows(rows, bias)
        m0 = uk.AffineMap.from_rows(rows, [0] * n)
        xy = uk.rvec([a + b for a, b in zip(x.entries, y.entries)])
        lhs = [a - b for a, b in zip(uk.affine_apply(m, xy).entries,
                                     uk.affine_apply(m, y).entries)]
        assert uk.rvec(lhs) == uk.affine_apply(m0, x)


class TestDot:
    def test_orthogonal(self):
        assert uk.dot(uk.rvec([1, 0]), uk.rvec([0, 1])) == 0

    def test_doubled_bit_self_score(self):
        # One matching complemented-bit pair per two entries.
        v = uk.rvec([1, 0, 1, 0])
        assert uk.dot(v, v) == 2

    def test_hand_checked(self):
        assert uk.dot(uk.rvec([F(1, 2), F(1, 3)]), uk.rvec([2, 3])) == 2

    def test_width_mismatch(self):
        with pytest.raises(DimensionError):
            uk.dot(uk.rvec([1]), uk.rvec([1, 2]))


class TestBitLength:
    def test_zero_is_one(self):
        assert uk.bit_length(F(0)) == 1

    def test_one_is_one(self):
        assert uk.bit_length(F(1)) == 1

    def test_seven_eighths(self):
        # 7 = 111b (3 bits), 8 = 1000b (4 bits); the convention takes the max.
        assert uk.bit_length(F(7, 8)) == 4

    def test_sign_ignored(self):
        assert uk.bit_length(F(-7, 8)) == uk.bit_length(F(7, 8))

    @given(st.fractions())
    def test_matches_binary_expansion(self, x):
        assert uk.bit_length(x) == naive_bits(x)


class TestRationals:
    @given(st.integers(-50, 50), st.integers(1, 50),
           st.integers(-50, 50), st.integers(1, 50))
    def test_exact_addition(self, p, q, r, s):
        got = F(p, q) + F(r, s)
        num, den = add_reduced(p, q, r, s)
        assert (got.numerator, got.denominator) == (num, den)

    @given(st.integers(-100, 100), st.integers(1, 100))
    def test_canonicalization_idempotent(self, p, q):
        x = uk.rational(F(p, q))
        assert uk.rational(x) == x
        assert (x.numerator, x.denominator) == (uk.rational(x).numerator,
                                                uk.rational(x).denominator)

    def test_parse_and_format(self):
        assert uk.parse_rational("3/4") == F(3, 4)
        assert uk.parse_rational("-3/4") == F(-3, 4)
        assert uk.parse_rational("7") == 7
        assert uk.format_rational(F(3, 4)) == "3/4"
        assert uk.format_rational(F(-3, 4)) == "-3/4"
        assert uk.format_rational(F(7)) == "7"
        assert uk.format_rational(F(0)) == "0"

    @given(st.integers(-1000, 1000), st.integers(1, 1000))
    def test_parse_format_round_trip(self, p, q):
        x = F(p, q)
        assert uk.parse_rational(uk.format_rational(x)) == x

    def test_parse_rejects_bad_syntax(self):
        for bad in ("", "1/0", "1.5", "1/-2", "+3", "a/b", "1 / 2"):
            with pytest.raises(ParseError):
                uk.parse_rational(bad)


class TestVectors:
    def test_concat_and_width(self):
        u = uk.rvec([1, 2])
        v = uk.rvec([3])
        assert u.concat(v) == uk.rvec([1, 2, 3])
        assert u.width == 2

    def test_zero(self):
        assert uk.RationalVector.zero(3) == uk.rvec([0, 0, 0])
