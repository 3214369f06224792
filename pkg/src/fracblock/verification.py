"""Batch numerical checks of the coefficient inequalities behind the scheme's analysis.

Each check returns a :class:`CheckReport`. A failed inequality is recorded as a
violation, never raised. Inequalities that involve the computed weights are
tested with slack ``tolerance * scale`` (scale = largest magnitude involved) to
absorb roundoff. The closed-form inequalities are evaluated in a
cancellation-free form and tested strictly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .caputo import Grid, discrete_caputo
from .kernels import NU0, bbar_kernel, normalized_row, p_kernel, theta, transformed_row
from .solver import NewtonConfig, Problem, solve
from .special import gamma_fn, log_mittag_leffler
from .weights import alpha0

__all__ = [
    "Violation",
    "CheckReport",
    "VerificationConfig",
    "check_lemma_3_1",
    "check_lemma_3_2",
    "check_kernel_bounds",
    "check_appendix_a",
    "check_mittag_leffler_bound",
    "check_kernel_positivity_inequality",
    "empirical_truncation_order",
    "stability_experiment",
    "stability_bound",
    "DEFAULT_CHECKS",
    "run_suite",
    "reports_to_json",
]


class Violation(NamedTuple):
    item: str
    nu: float
    index: object
    lhs: float
    rhs: float


@dataclass(frozen=True)
class CheckReport:
    name: str
    grid: dict
    violations: tuple = ()
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "grid": self.grid,
            "violations": [v._asdict() for v in self.violations],
            "violations_by_item": self.counts(),
            "data": self.data,
        }

    def counts(self) -> dict:
        out: dict = {}
        for v in self.violations:
            out[v.item] = out.get(v.item, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=2)

    def summary(self) -> str:
        if self.passed:
            return f"{self.name}: PASS"
        items = ", ".join(f"{k} x{n}" for k, n in self.counts().items())
        return f"{self.name}: FAIL ({len(self.violations)} violations: {items})"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def reports_to_json(reports) -> str:
    """Deterministic JSON for a list of reports, ordered by name."""
    ordered = sorted(reports, key=lambda r: r.name)
    return json.dumps([_plain(r.to_dict()) for r in ordered], sort_keys=True, indent=2)


def _default_appendix_nu():
    return (0.01,) + tuple(round(0.05 * i, 2) for i in range(1, 20)) + (0.99,)


@dataclass(frozen=True)
class VerificationConfig:
    pi_b: float = 9.0
    nu_grid: tuple = tuple(round(0.1 * i, 1) for i in range(1, 10))
    index_max: int = 200
    kernel_n: int = 64
    tolerance: float = 1e-12
    identity_tol: float = 1e-10
    appendix_nu_grid: tuple = field(default_factory=_default_appendix_nu)
    appendix_k_max: int = 500
    ml_mu: tuple = (0.5, 1.0, 5.0)
    samples: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.pi_b > 0:
            raise ValueError("pi_b must be positive")
        if self.index_max < 4 or self.kernel_n < 3 or self.appendix_k_max < 2:
            raise ValueError("index_max >= 4, kernel_n >= 3 and appendix_k_max >= 2 are required")
        if self.tolerance < 0 or self.identity_tol < 0:
            raise ValueError("tolerances must be non-negative")
        for nu in tuple(self.nu_grid) + tuple(self.appendix_nu_grid):
            if not 0.0 < nu < 1.0:
                raise ValueError(f"grid orders must lie in (0, 1), got {nu}")
        object.__setattr__(self, "nu_grid", tuple(float(v) for v in self.nu_grid))
        object.__setattr__(self, "appendix_nu_grid", tuple(float(v) for v in self.appendix_nu_grid))
        object.__setattr__(self, "ml_mu", tuple(float(v) for v in self.ml_mu))

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown verification settings: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


class _Collector:
    def __init__(self, tol: float):
        self.tol = tol
        self.items: list[Violation] = []

    def greater(self, item, nu, index, lhs, rhs, scale=None):
        """Record a violation of lhs > rhs (up to tol * scale)."""
        s = max(1.0, abs(lhs), abs(rhs)) if scale is None else scale
        if not lhs > rhs - self.tol * s:
            self.items.append(Violation(item, float(nu), index, float(lhs), float(rhs)))

    def strict(self, item, nu, index, lhs, rhs):
        if not lhs > rhs:
            self.items.append(Violation(item, float(nu), index, float(lhs), float(rhs)))

    def close(self, item, nu, index, value, target, tol):
        if not abs(value - target) <= tol:
            self.items.append(Violation(item, float(nu), index, float(value), float(target)))


def check_lemma_3_1(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """Properties of the normalized coefficients d_k^j for j = 4..index_max.

    (1) sum_k d_k^j = 1; (2) d_k^j > 2 nu / (3 alpha0 Gamma(1-nu)) (j-k)**(-nu-1),
    k = 2..j-3; (3) d_{j-1}, d_0, d_1 > 0; (4) d_{j-2} > 0 below NU0 and < 0 above;
    (5) d_{j-1}**2 / 4 + d_{j-2} > 2**-nu nu / (8 alpha0 Gamma(1-nu)).
    """
    out = _Collector(cfg.tolerance)
    for nu in cfg.nu_grid:
        a0 = alpha0(nu)
        g1 = gamma_fn(1.0 - nu)
        c2 = 2.0 * nu / (3.0 * a0 * g1)
        c5 = 2.0**-nu * nu / (8.0 * a0 * g1)
        for j in range(4, cfg.index_max + 1):
            d = normalized_row(nu, j).d
            scale = float(np.sum(np.abs(d)))
            out.close("1: sum d = 1", nu, j, float(math.fsum(d)), 1.0, cfg.tolerance * scale)
            if j >= 5:
                k = np.arange(2, j - 2)
                rhs = c2 * (j - k).astype(float) ** (-nu - 1.0)
                bad = ~(d[k] > rhs - cfg.tolerance)
                for kk in np.flatnonzero(bad):
                    out.items.append(Violation("2: d_k lower bound", nu, (j, int(k[kk])), float(d[k[kk]]), float(rhs[kk])))
            for idx in (j - 1, 0, 1):
                out.greater("3: positive", nu, (j, idx), float(d[idx]), 0.0, scale=1.0)
            if abs(nu - NU0) > 1e-9:
                sign = float(np.sign(d[j - 2]))
                if sign != (1.0 if nu < NU0 else -1.0):
                    out.items.append(Violation("4: sign of d_{j-2}", nu, j, float(d[j - 2]), 0.0))
            out.greater("5", nu, j, 0.25 * d[j - 1] ** 2 + d[j - 2], c5, scale=1.0)
    grid = {"nu": list(cfg.nu_grid), "j": [4, cfg.index_max], "nu0": NU0}
    return CheckReport("lemma_3_1", grid, tuple(out.items))


def check_lemma_3_2(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """(1) 0 < dbar_2^3 < theta < 2/3; (2) dbar_k^j > 0 for k <= j-2;
    (3) theta + sum_{k <= j-2} dbar_k^j < 1; j = 3..index_max."""
    out = _Collector(cfg.tolerance)
    for nu in cfg.nu_grid:
        th = theta(nu)
        d23 = transformed_row(nu, 3).dbar[2]
        out.greater("1: dbar_2^3 > 0", nu, 3, d23, 0.0, scale=1.0)
        out.greater("1: dbar_2^3 < theta", nu, 3, th, d23, scale=1.0)
        out.greater("1: theta < 2/3", nu, 3, 2.0 / 3.0, th, scale=1.0)
        for j in range(3, cfg.index_max + 1):
            dbar = transformed_row(nu, j).dbar
            head = dbar[: j - 1]
            for k in np.flatnonzero(~(head > -cfg.tolerance)):
                out.items.append(Violation("2: dbar_k > 0", nu, (j, int(k)), float(head[k]), 0.0))
            out.greater("3: theta + sum dbar < 1", nu, j, 1.0, th + float(math.fsum(head)), scale=1.0)
    return CheckReport("lemma_3_2", {"nu": list(cfg.nu_grid), "j": [3, cfg.index_max]}, tuple(out.items))


def _omega(nu: float, x):
    # kernel x**-nu / Gamma(1 - nu)
    return np.asarray(x, dtype=float) ** -nu / gamma_fn(1.0 - nu)


def check_kernel_bounds(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """Bbar and P kernels on the grid dx = 1 / kernel_n, n = 3..kernel_n.

    Bbar_0 > Bbar_1 > ... > Bbar_{n-1} > 0 and
    Bbar_k^n >= ((k+1)**(1-nu) - k**(1-nu)) / (pi_b dx**nu Gamma(2-nu));
    P >= 0 with P_{n-2} = P_{n-1} = 0; sum_{j=m}^n P_{n-j}^n Bbar_{j-m}^j = 1;
    P_{n-j}^n <= pi_b Gamma(2-nu) dx**nu; sum_{j>=3} P_{n-j}^n omega(x_j) <= pi_b;
    sum_{j>=3} P_{n-j}^n Bbar_{j-1}^j <= 1 and sum_{j>=3} P_{n-j}^n Bbar_{j-2}^j <= 1.
    """
    out = _Collector(cfg.tolerance)
    dx = 1.0 / cfg.kernel_n
    worst_identity = 0.0
    for nu in cfg.nu_grid:
        g2 = gamma_fn(2.0 - nu)
        p_cap = cfg.pi_b * g2 * dx**nu
        B = {n: bbar_kernel(nu, dx, n).bbar for n in range(3, cfg.kernel_n + 1)}
        for n in range(3, cfg.kernel_n + 1):
            b = B[n]
            sc = float(b[0])
            out.greater("Bbar positive", nu, (n, n - 1), float(b[-1]), 0.0, scale=sc)
            for k in np.flatnonzero(~(np.diff(b) < cfg.tolerance * sc)):
                out.items.append(Violation("Bbar decreasing", nu, (n, int(k)), float(b[k]), float(b[k + 1])))
            k = np.arange(n, dtype=float)
            lower = ((k + 1.0) ** (1.0 - nu) - k ** (1.0 - nu)) / (cfg.pi_b * dx**nu * g2)
            for kk in np.flatnonzero(~(b >= lower - cfg.tolerance * sc)):
                out.items.append(Violation("Bbar lower bound", nu, (n, int(kk)), float(b[kk]), float(lower[kk])))

            p = p_kernel(nu, dx, n).p
            for jj in np.flatnonzero(~(p >= 0.0)):
                out.items.append(Violation("P non-negative", nu, (n, int(jj)), float(p[jj]), 0.0))
            if p[n - 2] != 0.0 or p[n - 1] != 0.0:
                out.items.append(Violation("P_{n-2} = P_{n-1} = 0", nu, n, float(p[n - 2]), float(p[n - 1])))
            for m in range(3, n + 1):
                s = math.fsum(p[n - j] * B[j][j - m] for j in range(m, n + 1))
                worst_identity = max(worst_identity, abs(s - 1.0))
                out.close("convolution identity", nu, (n, m), s, 1.0, cfg.identity_tol)
            for j in range(3, n + 1):
                if not p[n - j] <= p_cap * (1.0 + cfg.tolerance):
                    out.items.append(Violation("P upper bound", nu, (n, j), float(p[n - j]), p_cap))
            x = dx * np.arange(3, n + 1)
            s1 = float(np.dot(p[n - np.arange(3, n + 1)], _omega(nu, x)))
            out.greater("sum P omega <= pi_b", nu, n, cfg.pi_b, s1, scale=cfg.pi_b)
            s_m1 = math.fsum(p[n - j] * B[j][j - 1] for j in range(3, n + 1))
            s_m2 = math.fsum(p[n - j] * B[j][j - 2] for j in range(3, n + 1))
            out.greater("m = 1 sum <= 1", nu, n, 1.0 + cfg.identity_tol, s_m1, scale=1.0)
            out.greater("m = 2 sum <= 1", nu, n, 1.0 + cfg.identity_tol, s_m2, scale=1.0)
    grid = {"nu": list(cfg.nu_grid), "n": [3, cfg.kernel_n], "dx": dx, "pi_b": cfg.pi_b}
    return CheckReport("kernel_bounds", grid, tuple(out.items), {"max_identity_residual": worst_identity})


def _pow_m1(x, p):
    # (1 + x)**p - 1 without cancellation
    return np.expm1(p * np.log1p(x))


def _odd_binomial_tail(q, t, start: int, terms: int = 120):
    """sum_{i odd, i >= start} binom(q, i) t**i for scalar q and array t (|t| <= 1/2)."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    c = _binom(q, start)
    for i in range(start, start + 2 * terms, 2):
        total += c * t**i
        c *= (q - i) / (i + 1) * (q - i - 1) / (i + 2)
    return total


def appendix_item_margins(nu: float, k: np.ndarray) -> dict:
    """lhs - rhs (oriented so that the item holds iff the margin is > 0).

    Item 1 uses the constant of its proof, (1-nu)/k**2 [2**nu - (2/3)**nu];
    the half-size constant sometimes quoted for it is false for every k >= 2.
    """
    k = np.asarray(k, dtype=float)
    t = 1.0 / k
    p = 1.0 - nu
    q = 2.0 - nu
    m1 = _pow_m1(-t, p) + _pow_m1(t, p) + p * t**2 * (2.0**nu - (2.0 / 3.0) ** nu)
    # (1-t)^q - (1+t)^q + 2q t - q(1-nu)nu t^3/3 = -2 sum_{odd i >= 5} binom(q, i) t^i
    m2 = -2.0 * _odd_binomial_tail(q, t, 5)
    u = 1.0 / (2.0 * k)
    m3 = 0.5 * q * u * (_pow_m1(-2.0 * u, p) - 4.0 * _pow_m1(u, p)) + _pow_m1(-2.0 * u, q) + 2.0 * _pow_m1(u, q)
    r = 2.0 / 3.0
    m4 = -(nu**2) - 12.0 + 3.0 * r**nu * (nu**2 + 2.0 * nu + 4.0)
    m5 = -(6.0 - nu - (2.0 + nu / 2.0) * 2.0**nu * 3.0**p)
    m6 = -(-2.0 * nu**3 + 12.0 * nu**2 - 56.0 * nu - 48.0 + 3.0 * r**nu * (3.0 * nu**3 + 4.0 * nu**2 + 20.0 * nu + 16.0))
    m7 = (2.0 * nu - 3.0) * q * p * nu / 27.0 - 2.0**p * (4.0 - nu - (2.0 + nu) * 2.0**p)
    m8 = 12.0 - nu**2 - (12.0 + 8.0 * nu + nu**2) * 2.0**-nu - (2.0 + nu) * q * p * nu / 16.0
    return {1: m1, 2: m2, 3: m3, 4: m4, 5: m5, 6: m6, 7: m7, 8: m8}


def lemma_a2_f(nu, a1, a2, a3, b, m):
    tm = 2.0 * m
    return (2.0 - nu) * (a1 * tm ** (1.0 - nu) + a2 * (tm + b) ** (1.0 - nu)) + a3 * (tm ** (2.0 - nu) - (tm + b) ** (2.0 - nu))


def _binom(x: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (x - i) / (i + 1)
    return out


def lemma_a2_bounds(nu, a1, a2, a3, b, m):
    """Upper bounds on f: case 1 returns (tight, loose), case 2 returns (bound,)."""
    tm = 2.0 * m
    pre = (2.0 - nu) * tm ** (1.0 - nu)
    base = a1 + a2 - a3 * b
    x = b / tm
    if a2 < 0:
        tight = base + sum(_binom(1.0 - nu, k) * (a2 - a3 * b / (k + 1)) * x**k for k in (1, 2))
        return pre * tight, pre * base
    corr = a2 * x**2 * (1.0 - nu) * nu / 6.0 * (1.0 - 0.5 * (nu + 1.0) * x)
    return (pre * (base - corr),)


def check_appendix_a(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """Closed-form inequalities (items 1-8) on appendix_nu_grid x k = 2..appendix_k_max,
    plus randomly sampled instances of both cases of the binomial-series bound."""
    out = _Collector(0.0)
    k = np.arange(2, cfg.appendix_k_max + 1)
    for nu in cfg.appendix_nu_grid:
        margins = appendix_item_margins(nu, k)
        for item in (1, 2, 3):
            mg = margins[item]
            for i in np.flatnonzero(~(mg > 0.0)):
                out.items.append(Violation(f"A1.{item}", nu, int(k[i]), float(mg[i]), 0.0))
        for item in range(4, 9):
            out.strict(f"A1.{item}", nu, None, float(margins[item]), 0.0)

    rng = np.random.default_rng(cfg.seed)
    for s in range(cfg.samples):
        nu = float(rng.uniform(0.02, 0.98))
        m = int(rng.integers(2, 60))
        b = float(rng.uniform(0.1, 0.9)) * 2.0 * m
        a1 = float(rng.uniform(-2.0, 2.0))
        scale_f = (2.0 - nu) * (2.0 * m) ** (1.0 - nu) * (2.0 * m + b)
        if s % 2 == 0:
            a2 = -float(rng.uniform(0.1, 2.0))
            a3 = float(rng.uniform(-3.0, 1.5)) * a2 / b  # a3 b / a2 <= 3/2
            f = lemma_a2_f(nu, a1, a2, a3, b, m)
            tight, loose = lemma_a2_bounds(nu, a1, a2, a3, b, m)
            sc = scale_f * (abs(a1) + abs(a2) + abs(a3) * b)
            idx = ("case1", s)
            _greater_scaled(out, "A2 case 1 (tight)", nu, idx, tight, f, cfg.tolerance * sc)
            _greater_scaled(out, "A2 case 1 (loose)", nu, idx, loose, tight, cfg.tolerance * sc)
        else:
            a2 = float(rng.uniform(0.1, 2.0))
            a3 = 2.0 * a2 / b
            f = lemma_a2_f(nu, a1, a2, a3, b, m)
            (bound,) = lemma_a2_bounds(nu, a1, a2, a3, b, m)
            sc = scale_f * (abs(a1) + abs(a2) + abs(a3) * b)
            _greater_scaled(out, "A2 case 2", nu, ("case2", s), bound, f, cfg.tolerance * sc)
    grid = {"nu": list(cfg.appendix_nu_grid), "k": [2, cfg.appendix_k_max], "a2_samples": cfg.samples}
    return CheckReport("appendix_a", grid, tuple(out.items))


def _greater_scaled(out: _Collector, item, nu, index, lhs, rhs, slack):
    if not lhs > rhs - slack:
        out.items.append(Violation(item, float(nu), index, float(lhs), float(rhs)))


def check_mittag_leffler_bound(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """sum_{j=3}^{n-1} P_{n-j}^n E_nu(mu x_j**nu) <= (pi_b / mu) (E_nu(mu x_n**nu) - 1), dx = 1/kernel_n.

    Compared in log space because E_nu(mu x**nu) overflows for small nu.
    Violations report log(lhs) and log(rhs).
    """
    out = _Collector(0.0)
    dx = 1.0 / cfg.kernel_n
    log_slack = math.log1p(cfg.tolerance)
    for nu in cfg.nu_grid:
        for mu in cfg.ml_mu:
            logE = [log_mittag_leffler(nu, mu * (j * dx) ** nu) for j in range(cfg.kernel_n + 1)]
            for n in range(3, cfg.kernel_n + 1):
                p = p_kernel(nu, dx, n).p
                parts = [math.log(p[n - j]) + logE[j] for j in range(3, n) if p[n - j] > 0.0]
                lhs = _logsumexp(parts)
                rhs = math.log(cfg.pi_b / mu) + logE[n] + math.log(-math.expm1(-logE[n]))
                if not lhs <= rhs + log_slack:
                    out.items.append(Violation("ML bound (log scale)", nu, (mu, n), lhs, rhs))
    grid = {"nu": list(cfg.nu_grid), "mu": list(cfg.ml_mu), "n": [3, cfg.kernel_n], "dx": dx}
    return CheckReport("mittag_leffler_bound", grid, tuple(out.items))


def _logsumexp(values) -> float:
    if not values:
        return -math.inf
    top = max(values)
    if math.isinf(top):
        return top
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


def check_kernel_positivity_inequality(cfg: VerificationConfig = VerificationConfig()) -> CheckReport:
    """2 e_j sum_k Bbar_{j-k}^j (e_k - e_{k-1}) >= sum_k Bbar_{j-k}^j (e_k**2 - e_{k-1}**2),
    k = 3..j, on random vectors e_2..e_j (dx = 1/kernel_n)."""
    out = _Collector(cfg.tolerance)
    rng = np.random.default_rng(cfg.seed)
    dx = 1.0 / cfg.kernel_n
    for nu in cfg.nu_grid:
        for _ in range(max(1, cfg.samples // 10)):
            j = int(rng.integers(3, cfg.kernel_n + 1))
            e = rng.normal(size=j - 1)  # e_2..e_j
            b = bbar_kernel(nu, dx, j).bbar[: j - 2][::-1]  # Bbar_{j-k}, k = 3..j
            lhs = 2.0 * e[-1] * float(b @ np.diff(e))
            rhs = float(b @ np.diff(e**2))
            out.greater("energy inequality", nu, j, lhs, rhs, scale=float(np.sum(np.abs(b))) * float(np.max(e**2)))
    return CheckReport("kernel_positivity_inequality", {"nu": list(cfg.nu_grid), "j": [3, cfg.kernel_n]}, tuple(out.items))


def _fit_slope(dxs, errs) -> float:
    lx = np.log2(np.asarray(dxs, dtype=float))
    le = np.log2(np.asarray(errs, dtype=float))
    return float(np.polyfit(lx, le, 1)[0])


def empirical_truncation_order(
    problem: Problem,
    levels=(4, 5, 6, 7, 8),
    T: float = 1.0,
    expected_order: Optional[float] = None,
    order_tol: float = 0.1,
    caputo_exact: Optional[Callable[[float], float]] = None,
) -> CheckReport:
    """Max over j of |discrete Caputo of y(x_j) - exact Caputo of y at x_j| on dx = 2**-l.

    The exact derivative defaults to rhs(x, y(x)), which equals it for any
    problem whose ``exact`` solves the equation. The least-squares slope of
    log2(error) against log2(dx) must be within ``order_tol`` of
    ``expected_order`` (default 3 - nu).
    """
    if problem.exact is None:
        raise ValueError("truncation order needs a problem with an exact solution")
    nu = problem.nu
    exact = problem.exact
    caputo = caputo_exact or (lambda x: problem.rhs(x, exact(x)))
    dxs, errs = [], []
    for l in levels:
        grid = Grid.from_step(T, 2.0**-l)
        x = grid.points
        y = np.array([exact(v) for v in x])
        err = max(abs(discrete_caputo(nu, grid, y, j) - caputo(x[j])) for j in range(1, grid.size))
        dxs.append(grid.dx)
        errs.append(err)
    slope = _fit_slope(dxs, errs)
    target = 3.0 - nu if expected_order is None else expected_order
    viol = () if abs(slope - target) <= order_tol else (Violation("slope", nu, tuple(levels), slope, target),)
    data = {"dx": dxs, "max_error": errs, "slope": slope, "expected": target}
    return CheckReport("truncation_order", {"nu": [nu], "levels": list(levels), "T": T}, viol, data)


def stability_bound(nu: float) -> float:
    return (2.0 + nu) / (2.0 - nu)


def stability_experiment(nu: float, lam: float, dx: float, steps: int, y0: float = 1.0, slack: float = 1e-10) -> CheckReport:
    """Solve D^nu y = -lam y and check max_j |y_j| <= (2+nu)/(2-nu) |y0| + slack."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    steps = int(steps)
    if steps < 2 or steps % 2:
        raise ValueError("steps must be an even integer >= 2")
    grid = Grid(steps * dx, steps // 2)
    problem = Problem(nu, y0, rhs=lambda x, y: -lam * y, rhs_dy=lambda x, y: -lam)
    traj = solve(problem, grid, NewtonConfig())
    peak = float(np.max(np.abs(traj.values)))
    bound = stability_bound(nu) * abs(y0)
    viol = () if peak <= bound + slack else (Violation("max |y_j|", nu, steps, peak, bound),)
    data = {"lambda_dx_nu": lam * dx**nu, "max_abs": peak, "bound": bound, "final": float(traj.values[-1])}
    return CheckReport("stability", {"nu": [nu], "lambda": lam, "dx": dx, "steps": steps}, viol, data)


DEFAULT_CHECKS = {
    "appendix_a": check_appendix_a,
    "kernel_bounds": check_kernel_bounds,
    "kernel_positivity_inequality": check_kernel_positivity_inequality,
    "lemma_3_1": check_lemma_3_1,
    "lemma_3_2": check_lemma_3_2,
    "mittag_leffler_bound": check_mittag_leffler_bound,
}


def _run_named(args):
    name, cfg = args
    return DEFAULT_CHECKS[name](cfg)


def run_suite(cfg: VerificationConfig = VerificationConfig(), names=None, workers: int = 1) -> list[CheckReport]:
    """Run the named checks (all by default) and return reports ordered by name."""
    names = sorted(DEFAULT_CHECKS if names is None else names)
    unknown = [n for n in names if n not in DEFAULT_CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; known: {sorted(DEFAULT_CHECKS)}")
    jobs = [(n, cfg) for n in names]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_named, jobs))
    else:
        reports = [_run_named(j) for j in jobs]
    return sorted(reports, key=lambda r: r.name)
