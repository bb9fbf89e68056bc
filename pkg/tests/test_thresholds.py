import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_lab.errors import AlphaOutOfRange, InvalidSpec, OrderViolation
from spectral_lab.thresholds import (
    alpha_from_exponents,
    cubic_largest_root,
    fibonacci_gamma_bounds,
    sparse_gamma_bounds,
    sparse_threshold,
    sturmian_threshold,
    threshold_report,
)


def bisect_root(lam, lo, hi):
    f = lambda x: x**3 - (2 + lam) * x - 1
    with mpmath.workdps(40):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        for _ in range(200):
            mid = (lo + hi) / 2
            if f(mid) > 0:
                hi = mid
            else:
                lo = mid
        return float(lo)


def test_sturmian_threshold():
    assert sturmian_threshold(1, 1) == 2
    assert sturmian_threshold(1, 2) == 5
    assert sturmian_threshold(0.0078740, 7.21391) == pytest.approx(21.6338, abs=1e-4)
    with pytest.raises(OrderViolation):
        sturmian_threshold(2, 1)


@pytest.mark.parametrize("lam, lo, hi", [(1, 1.8, 1.9), (2, 2.0, 2.2), (0.3, 1.0, 3.0), (50, 5, 10)])
def test_cubic_root_against_bisection(lam, lo, hi):
    assert cubic_largest_root(lam) == pytest.approx(bisect_root(lam, lo, hi), abs=1e-12)


def test_cubic_root_golden_ratio_at_zero():
    assert cubic_largest_root(0) == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-14)
    assert cubic_largest_root(1) == pytest.approx(1.8793852415, abs=1e-10)
    assert cubic_largest_root(2) == pytest.approx(2.1149075, abs=1e-7)


@given(st.floats(0, 1e3))
def test_cubic_root_residual_and_monotone(lam):
    c = cubic_largest_root(lam)
    assert abs(c**3 - (2 + lam) * c - 1) < 1e-10 * max(1.0, c**3)
    assert cubic_largest_root(lam + 0.5) > c


def test_fibonacci_bounds_against_mp():
    g1, g2 = fibonacci_gamma_bounds(1)
    with mpmath.workdps(40):
        ln_phi = mpmath.log((mpmath.sqrt(5) + 1) / 2)
        c = mpmath.findroot(lambda x: x**3 - 3 * x - 1, 1.88)
        mg1 = mpmath.log(1 + mpmath.mpf(1) / 16) / (16 * ln_phi)
        mg2 = 1 + mpmath.log(mpmath.sqrt(7) * 4 * c) / ln_phi
    assert g1 == pytest.approx(float(mg1), rel=1e-13)
    assert g2 == pytest.approx(float(mg2), rel=1e-13)
    assert g1 == pytest.approx(0.0078740, abs=1e-7) and g2 == pytest.approx(7.21391, abs=5e-5)
    p = sturmian_threshold(g1, g2)
    assert 21.63 < p < 21.7


def test_fibonacci_gamma1_decreasing():
    vals = [fibonacci_gamma_bounds(l)[0] for l in (0.5, 1, 2, 5, 10, 100)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("alpha, p", [(0.5, 4.0), (0.25, 6.0), (0.75, 3.0)])
def test_sparse_threshold(alpha, p):
    assert sparse_threshold(alpha) == pytest.approx(p, abs=1e-15)


def test_sparse_branches_agree():
    a = 0.5
    assert (1 + 2 * a) / a == (3 + 2 * a) / (2 * a) == sparse_threshold(a) == 4.0
    assert sparse_threshold(0.5 - 1e-9) == pytest.approx(4.0, abs=1e-7)
    assert sparse_threshold(0.5 + 1e-9) == pytest.approx(4.0, abs=1e-7)
    with pytest.raises(AlphaOutOfRange):
        sparse_threshold(1.0)


@pytest.mark.parametrize("alpha, bounds", [(0.5, (1.0, 1.5)), (0.75, (0.5, 7 / 6)), (0.25, (3.0, 2.5))])
def test_sparse_gamma_bounds(alpha, bounds):
    assert sparse_gamma_bounds(alpha) == pytest.approx(bounds)


def test_alpha_from_exponents():
    assert alpha_from_exponents(0.4, 0.4) == 1
    assert alpha_from_exponents(1, 3) == 0.5
    with mpmath.workdps(30):
        want = 2 * mpmath.mpf("0.0078740") / (mpmath.mpf("0.0078740") + mpmath.mpf("7.21391"))
    assert alpha_from_exponents(0.0078740, 7.21391) == pytest.approx(float(want), rel=1e-14)


@given(st.floats(1e-3, 10), st.floats(1e-3, 10))
def test_threshold_exceeds_twice_gamma2(a, b):
    g1, g2 = min(a, b), max(a, b)
    if g1 < g2:
        assert sturmian_threshold(g1, g2) > 2 * g2


def test_reports():
    r = threshold_report("sturmian-fibonacci", lam=1).to_dict()
    assert r["gamma1_bound"]["kind"] == "sup-bound" and r["gamma2_bound"]["kind"] == "inf-bound"
    assert any("21.7" in n for n in r["notes"])
    s = threshold_report("sparse", alpha=0.5)
    assert s.threshold_p == 4.0 and s.threshold_p > 0
    with pytest.raises(InvalidSpec):
        threshold_report("almost-mathieu")
