import json
import math
import time

import numpy as np
import pytest

from fracblock.kernels import normalized_row, p_kernel
from fracblock.problems import make_problem
from fracblock.solver import Problem
from fracblock.special import gamma_fn, log_mittag_leffler
from fracblock.verification import (
    DEFAULT_CHECKS,
    CheckReport,
    VerificationConfig,
    Violation,
    appendix_item_margins,
    check_appendix_a,
    check_kernel_bounds,
    check_kernel_positivity_inequality,
    check_lemma_3_1,
    check_lemma_3_2,
    check_mittag_leffler_bound,
    empirical_truncation_order,
    reports_to_json,
    run_suite,
    stability_experiment,
)
from fracblock.weights import alpha0
from oracles import quadrature_row

pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")

SMALL = VerificationConfig(nu_grid=(0.2, 0.5, 0.8), index_max=40, kernel_n=24, appendix_k_max=60, samples=40)


def test_report_passed_iff_no_violations():
    ok = CheckReport("x", {"nu": [0.5]})
    bad = CheckReport("x", {}, (Violation("item", 0.5, 3, 1.0, 2.0), Violation("item", 0.5, 4, 1.0, 2.0)))
    assert ok.passed and ok.summary() == "x: PASS"
    assert not bad.passed
    assert bad.counts() == {"item": 2}
    assert "2 violations" in bad.summary()
    data = json.loads(bad.to_json())
    assert data["passed"] is False and data["violations"][0]["index"] == 3


def test_config_defaults_and_validation():
    cfg = VerificationConfig()
    assert cfg.pi_b == 9.0
    assert len(cfg.nu_grid) >= 9 and cfg.index_max >= 200 and cfg.kernel_n >= 64
    assert VerificationConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        VerificationConfig.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        VerificationConfig(nu_grid=(0.5, 1.0))
    with pytest.raises(ValueError):
        VerificationConfig(pi_b=0.0)
    with pytest.raises(ValueError):
        VerificationConfig(index_max=3)


def test_lemma_3_1_single_point():
    d = normalized_row(0.5, 4).d
    assert d[3] == pytest.approx(0.8, abs=1e-13)
    assert d.sum() == pytest.approx(1.0, abs=1e-13)
    assert check_lemma_3_1(VerificationConfig(nu_grid=(0.5,), index_max=4)).passed


def test_lemma_3_1_only_the_lower_bound_item_fails():
    report = check_lemma_3_1(SMALL)
    assert set(report.counts()) == {"2: d_k lower bound"}
    for v in report.violations:
        j, k = v.index
        assert (j - k) % 2 == 0
        assert 0.89 < v.lhs / v.rhs < 1.0


def test_lemma_3_1_zero_tolerance_only_adds_roundoff():
    report = check_lemma_3_1(VerificationConfig(nu_grid=(0.3,), index_max=60, tolerance=0.0))
    for v in report.violations:
        if v.item.startswith("1"):
            assert abs(v.lhs - v.rhs) < 1e-13


@pytest.mark.parametrize("nu", [0.3, 0.7])
def test_lower_bound_counterexample_with_quadrature_weights(nu):
    # the weights come from adaptive quadrature here, independent of the closed forms
    j, k = 21, 17
    w = quadrature_row(nu, j)
    a0 = w[-1]
    assert a0 == pytest.approx(alpha0(nu), rel=1e-10)
    d_k = -w[k] / a0
    bound = 2 * nu / (3 * a0 * gamma_fn(1 - nu)) * (j - k) ** (-nu - 1)
    assert d_k < bound


def test_lemma_3_2_passes():
    assert check_lemma_3_2(SMALL).passed


def test_kernel_bounds_pass_and_identity_residual():
    report = check_kernel_bounds(SMALL)
    assert report.passed, report.summary()
    assert report.data["max_identity_residual"] <= 1e-10


def test_closed_form_inequalities_pass():
    assert check_appendix_a(SMALL).passed


def test_closed_form_inequality_examples():
    m = appendix_item_margins(0.5, np.array([2.0]))
    assert m[1][0] > 0
    assert m[5] > 0  # the g(nu) < 0 item, oriented as a positive margin
    for item in range(4, 9):
        assert appendix_item_margins(0.0 + 1e-12, np.array([2.0]))[item] == pytest.approx(0.0, abs=1e-9)


def test_item_one_with_half_constant_fails_everywhere():
    # with half the leading constant the item is violated at every sampled point
    for nu in (0.05, 0.5, 0.95):
        k = np.arange(2, 200, dtype=float)
        t, p = 1.0 / k, 1.0 - nu
        margin = (1 - t) ** p + (1 + t) ** p - 2 + 0.5 * p * t**2 * (2.0**nu - (2.0 / 3.0) ** nu)
        assert np.all(margin < 0)


def test_mittag_leffler_bound_examples():
    assert check_mittag_leffler_bound(SMALL).passed
    nu, mu, dx, n = 0.5, 1.0, 1 / 16, 16
    p = p_kernel(nu, dx, n).p
    E = [math.exp(log_mittag_leffler(nu, mu * (j * dx) ** nu)) for j in range(n + 1)]
    lhs = sum(p[n - j] * E[j] for j in range(3, n))
    rhs = 9.0 / mu * (E[n] - 1.0)
    assert lhs <= rhs
    rhs_n = [9.0 / mu * (E[m] - 1.0) for m in range(3, n + 1)]
    assert all(b > a for a, b in zip(rhs_n, rhs_n[1:]))
    assert 0.0 <= 9.0 / mu * (E[3] - 1.0)  # n = 3 sum is empty


def test_kernel_positivity_inequality_passes():
    assert check_kernel_positivity_inequality(SMALL).passed


@pytest.mark.parametrize("nu,target", [(0.5, 2.5), (0.8, 2.2)])
def test_truncation_order_examples(nu, target):
    report = empirical_truncation_order(make_problem("example1", nu))
    assert report.passed
    assert report.data["slope"] == pytest.approx(target, abs=0.1)


def test_truncation_of_quadratic_is_roundoff():
    nu = 0.5
    c = gamma_fn(3.0) / gamma_fn(3.0 - nu)
    p = Problem(nu, 0.0, rhs=lambda x, y: c * x ** (2.0 - nu), exact=lambda x: x * x)
    report = empirical_truncation_order(p, expected_order=0.0, order_tol=math.inf)
    assert max(report.data["max_error"]) < 1e-12


def test_stability_experiment_examples():
    r = stability_experiment(0.5, 1.0, 0.1, 20)
    assert r.passed and r.data["bound"] == pytest.approx(5.0 / 3.0)
    dx = 1 / 64
    assert stability_experiment(0.5, 1000.0 / dx**0.5, dx, 64).passed
    tiny = stability_experiment(0.5, 1e-12, 0.1, 20)
    assert abs(tiny.data["final"] - 1.0) < 1e-10
    with pytest.raises(ValueError):
        stability_experiment(0.5, 0.0, 0.1, 20)
    with pytest.raises(ValueError):
        stability_experiment(0.5, 1.0, 0.1, 7)


def test_suite_is_deterministic_and_ordered():
    a = run_suite(SMALL)
    b = run_suite(SMALL, workers=2)
    assert [r.name for r in a] == sorted(DEFAULT_CHECKS)
    assert reports_to_json(a) == reports_to_json(b)
    json.loads(reports_to_json(a))


def test_suite_rejects_unknown_check():
    with pytest.raises(KeyError):
        run_suite(SMALL, ["nope"])


def test_default_suite_runtime():
    t0 = time.perf_counter()
    reports = run_suite()
    assert time.perf_counter() - t0 <= 60.0
    assert len(reports) == len(DEFAULT_CHECKS)
