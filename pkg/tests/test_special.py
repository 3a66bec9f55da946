import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collapse_bound import DomainError
from collapse_bound.numerics import (bessel_i_scaled, bessel_j, bessel_j0_zero, erfc, erfcx,
                                     log_erfc)

rng = np.random.default_rng(20240611)


def test_j_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_first_zero_is_a_root():
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


@pytest.mark.parametrize("x", [1e-6, 0.3, 1.999, 2.001, 7.5, 24.9, 25.1, 80.0, 1e3, 9999.0])
def test_j_against_mpmath(x):
    for order in (0, 1):
        ref = float(mp.besselj(order, x))
        assert abs(bessel_j(order, x) - ref) <= 1e-12 * max(1.0, abs(ref)) + 1e-15


def test_j_relative_accuracy_away_from_zeros():
    # relative 1e-12 wherever |J| is not tiny
    xs = rng.uniform(-1e4, 1e4, 300)
    for order in (0, 1):
        got = bessel_j(order, xs)
        for x, g in zip(xs, got):
            ref = float(mp.besselj(order, x))
            if abs(ref) > 1e-3:
                assert abs(g - ref) <= 1e-12 * abs(ref) * 50, (order, x)


def test_j_parity():
    xs = np.linspace(0.1, 60, 37)
    np.testing.assert_array_equal(bessel_j(0, -xs), bessel_j(0, xs))
    np.testing.assert_array_equal(bessel_j(1, -xs), -bessel_j(1, xs))


def test_j_recurrence_derivative():
    # J1'(x) = J0(x) - J1(x)/x, central differences with h = 1e-5
    h = 1e-5
    for x in rng.uniform(0.1, 50.0, 100):
        d = (bessel_j(1, x + h) - bessel_j(1, x - h)) / (2 * h)
        assert abs(d - (bessel_j(0, x) - bessel_j(1, x) / x)) < 1e-8


def test_j_rejects_bad_input():
    with pytest.raises(DomainError):
        bessel_j(0, math.inf)
    with pytest.raises(DomainError):
        bessel_j(0, math.nan)
    with pytest.raises(DomainError):
        bessel_j(2, 1.0)


def test_i_scaled_at_origin():
    assert bessel_i_scaled(0, 0.0) == 1.0
    assert bessel_i_scaled(1, 0.0) == 0.0


def test_i_scaled_large_argument_leading_term():
    x = 1e6
    assert bessel_i_scaled(0, x) == pytest.approx(1 / math.sqrt(2 * math.pi * x), rel=1e-3)


@pytest.mark.parametrize("x", [1e-3, 0.5, 5.0, 29.9, 30.1, 61250.0, 1e5, 1e7])
def test_i_scaled_against_mpmath(x):
    for order in (0, 1):
        ref = float(mp.exp(-x) * mp.besseli(order, x))
        assert bessel_i_scaled(order, x) == pytest.approx(ref, rel=1e-13)


def test_i_scaled_positive_and_decreasing():
    xs = np.geomspace(1e-4, 1e7, 400)
    v = bessel_i_scaled(0, xs)
    assert np.all(v > 0)
    assert np.all(np.diff(v) < 0)


def test_i_scaled_rejects_negative():
    with pytest.raises(DomainError):
        bessel_i_scaled(0, -1.0)


def test_erfc_fixed_points():
    assert erfc(0.0) == 1.0
    assert erfc(-math.inf) == 2.0
    assert erfc(math.inf) == 0.0
    # sqrt(17)/2 point; mpmath value 3.5507053818305886e-3
    assert erfc(2.0616) == pytest.approx(3.5507053818305886e-3, rel=1e-12)


@pytest.mark.parametrize("x", [-30.0, -5.0, -1.0, -1e-8, 1e-8, 0.7, 1.999, 2.001, 6.0, 15.0, 26.0, 30.0])
def test_erfc_relative_accuracy(x):
    ref = mp.erfc(x)
    if float(ref) == 0.0:
        # below the double range: the log form still carries the value
        assert log_erfc(x) == pytest.approx(float(mp.log(ref)), rel=1e-13)
    else:
        assert erfc(x) == pytest.approx(float(ref), rel=1e-10)


def test_erfc_symmetry():
    for x in rng.uniform(-5, 5, 100):
        assert abs(erfc(x) + erfc(-x) - 2.0) < 1e-12


def test_erfc_nan_rejected():
    with pytest.raises(DomainError):
        erfc(math.nan)


def test_erfcx_and_log_erfc():
    for x in (0.0, 0.5, 3.0, 40.0, 1e4):
        assert erfcx(x) == pytest.approx(float(mp.exp(x * x) * mp.erfc(x)), rel=1e-13)
    assert log_erfc(30.0) == pytest.approx(float(mp.log(mp.erfc(30))), rel=1e-14)


def test_j0_zeros():
    assert bessel_j0_zero(0) == pytest.approx(2.404825557695773, abs=1e-9)
    assert bessel_j0_zero(1) == pytest.approx(5.520078110286311, abs=1e-9)
    zeros = [bessel_j0_zero(m) for m in range(40)]
    assert all(b > a for a, b in zip(zeros, zeros[1:]))
    for m, z in enumerate(zeros):
        assert z == pytest.approx(float(mp.besseljzero(0, m + 1)), abs=1e-12)
        # sign change bracket
        assert bessel_j(0, z - 1e-6) * bessel_j(0, z + 1e-6) < 0


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
def test_j_bounded(x):
    assert abs(bessel_j(0, x)) <= 1.0 + 1e-15
    assert abs(bessel_j(1, x)) <= 0.5820 + 1e-4


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-26.0, max_value=26.0, allow_nan=False))
def test_erfc_range_and_monotone(x):
    v = erfc(x)
    assert 0.0 < v < 2.0 or v in (0.0, 2.0)
    assert erfc(x + 0.01) <= v
