import math
import warnings

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fracblock.special import (
    MittagLefflerConvergenceError,
    gamma_fn,
    log_gamma,
    log_mittag_leffler,
    mittag_leffler,
    monomial_caputo,
)

mpmath.mp.dps = 40


def test_gamma_known_values():
    assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma_fn(0.5) == pytest.approx(1.7724538509055160, rel=1e-14)
    assert gamma_fn(2.5) == pytest.approx(1.3293403881791370, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=30.0))
def test_gamma_matches_mpmath(x):
    ref = float(mpmath.gamma(x))
    assert gamma_fn(x) == pytest.approx(ref, rel=5e-14)
    assert log_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-14)


@given(st.floats(min_value=0.05, max_value=20.0))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(ValueError):
        gamma_fn(x)


def test_gamma_overflow_is_inf():
    assert gamma_fn(200.0) == math.inf


def test_mittag_leffler_special_cases():
    assert mittag_leffler(0.5, 0.0) == 1.0
    assert mittag_leffler(1.0, -1.0) == pytest.approx(0.36787944117144233, rel=1e-15)


def test_mittag_leffler_half_order_closed_form():
    # E_{1/2}(z) = exp(z^2) erfc(-z)
    ref = math.exp(1.0) * math.erfc(1.0)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(ref, rel=1e-14)


def _ml_oracle(nu, z):
    z, nu = mpmath.mpf(z), mpmath.mpf(nu)
    total, k = mpmath.mpf(0), 0
    while True:
        term = z**k / mpmath.gamma(1 + k * nu)
        total += term
        if k > 10 and abs(term) < mpmath.mpf(10) ** -35:
            return total
        k += 1


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.1, max_value=1.0), st.floats(min_value=-8.0, max_value=8.0))
def test_mittag_leffler_matches_series_oracle(nu, z):
    # keep to the representable, well-conditioned part of the domain
    assume(abs(z) ** (1.0 / nu) < 600.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        try:
            value = mittag_leffler(nu, z)
        except RuntimeWarning:
            assume(False)
    assert value == pytest.approx(float(_ml_oracle(nu, z)), rel=1e-11, abs=1e-12)


def test_mittag_leffler_domain():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0)
    with pytest.raises(ValueError):
        mittag_leffler(0.5, 51.0)
    with pytest.raises(MittagLefflerConvergenceError):
        mittag_leffler(0.5, 10.0, max_terms=3)


def test_mittag_leffler_cancellation_warning():
    with pytest.warns(RuntimeWarning):
        mittag_leffler(0.9, -40.0)


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=0.1, max_value=1.0), st.floats(min_value=1e-3, max_value=30.0))
def test_log_mittag_leffler_agrees_with_direct(nu, z):
    assume(z ** (1.0 / nu) < 600.0)
    assert log_mittag_leffler(nu, z) == pytest.approx(math.log(mittag_leffler(nu, z)), rel=1e-12, abs=1e-13)


def test_log_mittag_leffler_large_argument():
    # nu = 1 is the exponential
    assert log_mittag_leffler(1.0, 800.0) == pytest.approx(800.0, rel=1e-15)
    # E_{1/2}(z) ~ 2 exp(z^2)
    assert log_mittag_leffler(0.5, 40.0) == pytest.approx(1600.0 + math.log(2.0), rel=1e-15)
    assert log_mittag_leffler(0.1, 5.0) == pytest.approx(5.0**10 + math.log(10.0), rel=1e-15)
    assert log_mittag_leffler(0.5, 0.0) == 0.0
    with pytest.raises(ValueError):
        log_mittag_leffler(0.5, -1.0)


def test_monomial_caputo_examples():
    assert monomial_caputo(0.5, 3.5, 1.0) == pytest.approx(gamma_fn(4.5) / 6.0, rel=1e-14)
    assert monomial_caputo(0.4, 1.0, 0.0) == 0.0
    assert monomial_caputo(0.3, 0.3, 2.0) == pytest.approx(gamma_fn(1.3), rel=1e-14)
    with pytest.raises(ValueError):
        monomial_caputo(0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        monomial_caputo(0.5, 1.0, -1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=0.1, max_value=5.0), st.floats(0.01, 3.0))
def test_monomial_caputo_matches_integral(nu, sigma, x):
    # Caputo derivative as (1/Gamma(1-nu)) int_0^x (x-s)^-nu sigma s^(sigma-1) ds, via the beta function
    if nu == 1.0:
        ref = sigma * x ** (sigma - 1.0)
    else:
        ref = sigma * x ** (sigma - nu) * float(mpmath.beta(sigma, 1 - nu)) / float(mpmath.gamma(1 - nu))
    assert monomial_caputo(nu, sigma, x) == pytest.approx(ref, rel=1e-11)


def test_mittag_leffler_order_one_is_exp():
    for z in [-5.0 + 0.1 * i for i in range(101)]:
        assert abs(mittag_leffler(1.0, z) - math.exp(z)) <= 1e-12


@pytest.mark.parametrize("nu", [0.1 * i for i in range(1, 10)] + [1.0])
def test_mittag_leffler_at_zero_and_monotone(nu):
    assert mittag_leffler(nu, 0.0) == 1.0
    values = [mittag_leffler(nu, 0.025 * i) for i in range(41)]
    assert all(b > a for a, b in zip(values, values[1:]))


@given(st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=1e-6, max_value=100.0))
def test_monomial_caputo_constant_at_sigma_equal_order(nu, x):
    assert monomial_caputo(nu, nu, x) == pytest.approx(gamma_fn(1.0 + nu), rel=1e-14)
