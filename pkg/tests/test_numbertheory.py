from fractions import Fraction
from math import gcd

import mpmath
import pytest

from spectral_lab.errors import PrecisionExhausted, RationalTheta
from spectral_lab.numbertheory import (
    GOLDEN_MEAN,
    SILVER_MEAN,
    ContinuedFraction,
    bounded_density_statistic,
    continued_fraction,
    convergents,
    cylinder_interval,
    parse_theta,
)


def gauss_map_oracle(x, k):
    out = []
    with mpmath.workdps(80):
        for _ in range(k):
            y = 1 / x
            a = int(mpmath.floor(y))
            out.append(a)
            x = y - a
    return out


def test_golden_expansion():
    assert continued_fraction(GOLDEN_MEAN, 5).coefficients == (1, 1, 1, 1, 1)


def test_silver_expansion_matches_oracle():
    with mpmath.workdps(80):
        want = gauss_map_oracle(mpmath.sqrt(2) - 1, 4)
    assert list(continued_fraction("silver", 4).coefficients) == want == [2, 2, 2, 2]


def test_quadratic_irrational_long_expansion():
    cf = continued_fraction({"P": -3, "D": 13, "Q": 2}, 300)  # (sqrt(13) - 3)/2
    assert set(cf.coefficients) == {3}
    assert cf.bounded_density is True


def test_rational_rejected():
    with pytest.raises(RationalTheta):
        continued_fraction(0.5, 2)
    with pytest.raises(RationalTheta):
        continued_fraction(Fraction(3, 8), 2)


def test_decimal_precision_exhausted():
    dec = "0.6180339887498948482045868343656381"
    assert continued_fraction(dec, 20).coefficients == (1,) * 20
    with pytest.raises(PrecisionExhausted):
        continued_fraction(dec, 200)


def test_decimal_interval_contains_theta():
    th = parse_theta("0.4142135623730950488016887242096980785696")
    lo, hi = th.interval(200)
    with mpmath.workdps(80):
        x = mpmath.sqrt(2) - 1
        assert mpmath.mpf(lo.numerator) / lo.denominator <= x <= mpmath.mpf(hi.numerator) / hi.denominator


@pytest.mark.parametrize(
    "coeffs, means",
    [((1, 1, 1, 1), [1.0, 1.0, 1.0, 1.0]), ((2, 2, 2), [2.0, 2.0, 2.0]), ((1, 2, 3), [1.0, 1.5, 2.0])],
)
def test_running_means(coeffs, means):
    assert bounded_density_statistic(ContinuedFraction(coeffs, "test")) == means


@pytest.mark.parametrize(
    "coeffs, conv",
    [
        ((1, 1, 1, 1, 1), [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]),
        ((2,), [(1, 2)]),
        ((2, 2), [(1, 2), (2, 5)]),
    ],
)
def test_convergents(coeffs, conv):
    assert convergents(ContinuedFraction(coeffs, "test")) == conv


def test_convergent_properties():
    cf = continued_fraction(SILVER_MEAN, 30)
    conv = convergents(cf)
    qs = [q for _, q in conv]
    assert all(a < b for a, b in zip(qs, qs[1:]))
    assert all(gcd(p, q) == 1 for p, q in conv)
    x = SILVER_MEAN.interval(256)[0]
    assert all(abs(x - Fraction(p, q)) < Fraction(1, q * q) for p, q in conv)


def test_golden_denominators_are_fibonacci():
    qs = [q for _, q in convergents(continued_fraction(GOLDEN_MEAN, 25))]
    fib = [1, 2]
    while len(fib) < 25:
        fib.append(fib[-1] + fib[-2])
    assert qs == fib[:25]


def test_cylinder_contains_theta():
    for theta in (GOLDEN_MEAN, SILVER_MEAN):
        cf = continued_fraction(theta, 12)
        lo, hi = cylinder_interval(cf)
        t_lo, t_hi = theta.interval(128)
        assert lo <= t_lo and t_hi <= hi


def test_invalid_coefficients():
    with pytest.raises(ValueError):
        ContinuedFraction((), "x")
    with pytest.raises(ValueError):
        ContinuedFraction((1, 0), "x")
