import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracblock.special import gamma_fn, monomial_caputo
from oracles import quadrature_row
from fracblock.weights import alpha0, clear_cache, first_step_weights, history_row, row_weights

NU_GRID = [0.1 * i for i in range(1, 10)]
orders = st.floats(min_value=0.01, max_value=1.0)


pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def test_first_step_examples():
    fw = first_step_weights(0.5)
    assert fw.dhat[1] == pytest.approx(0.7522527780636751, rel=1e-14)
    # 2.5 / (sqrt(2) Gamma(2.5)), 30-digit oracle
    assert fw.dtilde[2] == pytest.approx(1.3298076013381089, rel=1e-14)


@given(orders)
def test_first_step_invariants(nu):
    fw = first_step_weights(nu)
    assert abs(sum(fw.dhat)) <= 1e-13
    assert abs(sum(fw.dtilde)) <= 1e-13
    assert fw.dhat[2] > 0 and fw.dtilde[2] > 0
    assert fw.dtilde[2] == pytest.approx(alpha0(nu), rel=1e-15)


@pytest.mark.parametrize("nu", [0.1, 0.3, 0.5, 0.8, 0.99, 1.0])
@pytest.mark.parametrize("j", [1, 2, 3, 4, 5, 6, 7, 10, 11, 40, 41])
def test_rows_match_quadrature(nu, j):
    np.testing.assert_allclose(row_weights(nu, j), quadrature_row(nu, j), rtol=0, atol=1e-10)


def test_history_row_examples():
    row = history_row(0.5, 5)
    assert row.coeffs.size == 6
    assert abs(row.coeffs.sum()) <= 1e-14
    assert row.coeffs[5] == pytest.approx(2.5 / (2**0.5 * gamma_fn(2.5)), rel=1e-14)
    r7 = history_row(0.3, 7).coeffs
    assert -r7[6] / alpha0(0.3) == pytest.approx(4 * 0.3 / 2.3, rel=1e-12)


@pytest.mark.parametrize("nu", NU_GRID)
def test_row_sums_and_quadratic_exactness(nu):
    for j in range(3, 201):
        w = row_weights(nu, j)
        assert w.size == j + 1
        assert abs(w.sum()) <= 1e-11
        assert w[-1] == alpha0(nu)
        x = np.arange(j + 1, dtype=float)
        exact = monomial_caputo(nu, 2.0, float(j))
        assert w @ x**2 == pytest.approx(exact, rel=1e-9)
        assert w @ x == pytest.approx(monomial_caputo(nu, 1.0, float(j)), rel=1e-9)


@pytest.mark.parametrize("nu", NU_GRID)
def test_odd_even_rows_share_node_weights(nu):
    for m in range(2, 40):
        odd, even = row_weights(nu, 2 * m + 1), row_weights(nu, 2 * m + 2)
        for k in range(2, m + 1):
            assert odd[2 * k] == pytest.approx(even[2 * k + 1], abs=1e-13)
            assert odd[2 * k - 1] == pytest.approx(even[2 * k], abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(orders, st.integers(min_value=3, max_value=2049))
def test_far_rows_are_exact_on_low_degree(nu, j):
    w = row_weights(nu, j)
    x = np.arange(j + 1, dtype=float) / j
    # rescaled to x_j = 1 so the quadratic test stays O(1)
    assert abs(w.sum()) <= 1e-12
    assert w @ x == pytest.approx(monomial_caputo(nu, 1.0, 1.0) * j**-nu, rel=1e-9)
    assert w @ x**2 == pytest.approx(monomial_caputo(nu, 2.0, 1.0) * j**-nu, rel=1e-9)


@pytest.mark.parametrize("nu", [0.2, 0.5, 0.9])
def test_series_and_closed_form_agree_at_switch(nu):
    from fracblock import weights as wmod

    for kind in ("mid", "shared", "odd0", "odd1", "odd2", "even0"):
        terms = wmod._terms(nu, kind)
        a = np.array([8.0, 9.0, 12.0])
        closed = sum(c * (a + s) ** p for c, s, p, _ in terms)
        series = a ** (2.0 - nu) * np.polynomial.polynomial.polyval(1.0 / a, wmod._series(nu, kind))
        np.testing.assert_allclose(series, closed, rtol=0, atol=1e-13)


def test_rows_are_read_only_and_cached():
    a = row_weights(0.4, 9)
    assert not a.flags.writeable
    assert row_weights(0.4, 9) is a
    with pytest.raises(ValueError):
        a[0] = 1.0


def test_clear_cache_rebuilds_identically():
    before = row_weights(0.45, 33).copy()
    clear_cache()
    after = row_weights(0.45, 33)
    np.testing.assert_array_equal(before, after)


def test_cache_is_safe_under_threads():
    clear_cache()
    results = {}

    def work(t):
        results[t] = [row_weights(0.35, j) for j in range(3, 120)]

    threads = [threading.Thread(target=work, args=(t,)) for t in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = results[0]
    for rows in results.values():
        for a, b in zip(rows, ref):
            np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("nu", [0.0, -0.5, 1.5, float("nan")])
def test_invalid_order(nu):
    with pytest.raises(ValueError):
        row_weights(nu, 5)


def test_invalid_index():
    with pytest.raises(IndexError):
        row_weights(0.5, 0)
    with pytest.raises(IndexError):
        history_row(0.5, 2)
