"""Scalar layer: precision contracts, exact parsing, rational oracles."""
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaspec import (
    PrecisionError,
    InvalidParameterError,
    QComplex,
    fraction_from_mpf,
    parse_rational,
    parse_scalar,
    with_precision,
)


def test_min_precision_enforced():
    with pytest.raises(PrecisionError):
        with_precision(32)
    with pytest.raises(PrecisionError):
        with_precision(63, lambda: None)


def test_third_at_64_bits():
    x = with_precision(64, lambda: mp.mpf(1) / 3)
    err = abs(fraction_from_mpf(x) - Fraction(1, 3))
    assert err <= Fraction(1, 2 ** 62)


def test_four_thirds_minus_one_at_256_bits():
    x = with_precision(256, lambda: mp.mpf(4) / 3 - 1)
    err = abs(fraction_from_mpf(x) - Fraction(1, 3))
    assert err <= Fraction(1, 2 ** 254)


def test_geometric_sum_matches_exact_oracle():
    # independent oracle: the same sum over exact rationals
    beta = Fraction(4, 3)
    exact = sum(Fraction(1) / beta ** i for i in range(1, 401))

    def compute():
        b = mp.mpf(4) / 3
        total = mp.mpf(0)
        p = mp.mpf(1)
        for _ in range(400):
            p = p / b
            total += p
        return total

    x = with_precision(256, compute)
    assert abs(fraction_from_mpf(x) - exact) <= Fraction(1, 2 ** 200)


@settings(max_examples=60, deadline=None)
@given(
    num=st.integers(min_value=-999, max_value=999),
    den=st.integers(min_value=1, max_value=999),
    terms=st.integers(min_value=1, max_value=12),
)
def test_doubling_precision_never_hurts(num, den, terms):
    # alternating-sign partial sums of q**i, evaluated at two precisions
    q = Fraction(num, den + 1000)
    exact = sum((-q) ** i for i in range(terms))

    def sum_at():
        b = mp.mpf(q.numerator) / q.denominator
        total = mp.mpf(0)
        p = mp.mpf(1)
        for _ in range(terms):
            total += p
            p = p * (-b)
        return total

    d1 = abs(fraction_from_mpf(with_precision(128, sum_at)) - exact)
    d2 = abs(fraction_from_mpf(with_precision(256, sum_at)) - exact)
    assert d2 <= d1


def test_parse_rational_forms():
    assert parse_rational("4/3") == Fraction(4, 3)
    assert parse_rational("1.25") == Fraction(5, 4)
    assert parse_rational("  3 ") == Fraction(3)
    with pytest.raises(InvalidParameterError):
        parse_rational("x")
    with pytest.raises(InvalidParameterError):
        parse_rational("1/0")


def test_parse_scalar_complex_forms():
    assert parse_scalar("1+2i") == QComplex(Fraction(1), Fraction(2))
    assert parse_scalar("0.5-0.25j") == QComplex(Fraction(1, 2), Fraction(-1, 4))
    assert parse_scalar("2i") == QComplex(Fraction(0), Fraction(2))
    assert parse_scalar("-i") == QComplex(Fraction(0), Fraction(-1))
    assert parse_scalar("-1/2+3/4i") == QComplex(Fraction(-1, 2), Fraction(3, 4))
    assert parse_scalar("7/5") == Fraction(7, 5)


@settings(max_examples=60, deadline=None)
@given(
    a=st.fractions(min_value=-5, max_value=5, max_denominator=40),
    b=st.fractions(min_value=-5, max_value=5, max_denominator=40),
)
def test_qcomplex_inverse_roundtrip(a, b):
    z = QComplex(a, b)
    if not z:
        return
    assert z * z.inverse() == QComplex(Fraction(1))
    assert (z ** 3) * (z ** -3) == QComplex(Fraction(1))


def test_qcomplex_arithmetic_matches_complex():
    z = QComplex(Fraction(3, 4), Fraction(-2, 5))
    w = QComplex(Fraction(-1, 3), Fraction(7, 2))
    for op in ("add", "sub", "mul", "truediv"):
        got = getattr(z, f"__{op}__")(w)
        ref = getattr(complex(z.re, z.im), f"__{op}__")(complex(w.re, w.im))
        assert abs(complex(float(got.re), float(got.im)) - ref) < 1e-12
