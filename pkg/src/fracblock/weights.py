"""Coefficients of the piecewise-quadratic discrete Caputo derivative.

For a uniform grid x_j = j*dx the discrete derivative at x_j is

    dx**-nu * sum_k w_k y_k

with weights that depend on ``nu`` and ``j`` only. Steps 1 and 2 share the
quadratic through (x0, x1, x2); later odd steps use blocks [x_{2k-1}, x_{2k+1}]
after a half block [x0, x1], later even steps use blocks [x_{2k}, x_{2k+2}].

The closed forms contain differences such as (2m)**(2-nu) - (2m+2)**(2-nu)
that lose about 2*log10(m) digits to cancellation. Far from the diagonal the
weights are therefore summed from their binomial series in 1/m instead.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .special import gamma_fn

__all__ = [
    "FirstStepWeights",
    "HistoryRow",
    "check_order",
    "alpha0",
    "first_step_weights",
    "history_row",
    "row_weights",
    "clear_cache",
]


def check_order(nu: float) -> float:
    nu = float(nu)
    if not 0.0 < nu <= 1.0:
        raise ValueError(f"fractional order must lie in (0, 1], got {nu!r}")
    return nu


def alpha0(nu: float) -> float:
    """Diagonal weight (nu + 2) / (Gamma(3 - nu) 2**nu) shared by every row j >= 2."""
    nu = check_order(nu)
    return (nu + 2.0) / (gamma_fn(3.0 - nu) * 2.0**nu)


@dataclass(frozen=True)
class FirstStepWeights:
    dhat: tuple[float, float, float]
    dtilde: tuple[float, float, float]


@dataclass(frozen=True)
class HistoryRow:
    j: int
    coeffs: np.ndarray  # read-only, length j + 1


@lru_cache(maxsize=None)
def _first_step(nu: float) -> FirstStepWeights:
    g = gamma_fn(3.0 - nu)
    s = 2.0**nu
    dhat = ((3.0 * nu - 4.0) / (2.0 * g), 2.0 * (1.0 - nu) / g, nu / (2.0 * g))
    dtilde = ((3.0 * nu - 2.0) / (s * g), -4.0 * nu / (s * g), (nu + 2.0) / (s * g))
    return FirstStepWeights(dhat, dtilde)


def first_step_weights(nu: float) -> FirstStepWeights:
    """Weights (D^_0, D^_1, D^_2) for step 1 and (D~_0, D~_1, D~_2) for step 2."""
    return _first_step(check_order(nu))


def _pw(a, p: float) -> np.ndarray:
    # a**p with 0**p := 0 also when p == 0 (the nu -> 1 limit of the weights)
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    pos = a > 0.0
    out[pos] = a[pos] ** p
    return out


# Every weight is sum_t c_t (a + s_t)**p_t with p_t in {1-nu, 2-nu}. Terms are
# (coefficient factor of (2-nu)/2, plain coefficient, shift s, 1 or 2 for p_t).
_TERMS = {
    "mid": ((4.0, 0.0, 0, 1), (4.0, 0.0, 2, 1), (0.0, 2.0, 0, 2), (0.0, -2.0, 2, 2)),
    "shared": ((-1.0, 0.0, 0, 1), (-6.0, 0.0, 2, 1), (-1.0, 0.0, 4, 1), (0.0, -1.0, 0, 2), (0.0, 1.0, 4, 2)),
    "odd0": ((1.0, 0.0, 0, 1), (-3.0, 0.0, 1, 1), (0.0, -1.0, 0, 2), (0.0, 1.0, 1, 2)),
    "odd1": ((-1.0, 0.0, 0, 1), (-3.0, 0.0, 2, 1), (4.0, 0.0, 3, 1), (0.0, -1.0, 0, 2), (0.0, 3.0, 2, 2), (0.0, -2.0, 3, 2)),
    "odd2": ((4.0, 0.0, 0, 1), (3.0, 0.0, 2, 1), (-1.0, 0.0, 3, 1), (0.0, 2.0, 0, 2), (0.0, -3.0, 2, 2), (0.0, 1.0, 3, 2)),
    "even0": ((-1.0, 0.0, 0, 1), (-3.0, 0.0, 2, 1), (0.0, -1.0, 0, 2), (0.0, 1.0, 2, 2)),
}
_SERIES_TERMS = 64


def _terms(nu: float, kind: str):
    h = 0.5 * (2.0 - nu)
    return [(fh * h + c, s, (1.0 - nu) if e == 1 else (2.0 - nu), e) for fh, c, s, e in _TERMS[kind]]


@lru_cache(maxsize=None)
def _series(nu: float, kind: str) -> np.ndarray:
    """c_i with sum_t c_t (a + s_t)**p_t = a**(2-nu) sum_i c_i a**-i for a > 2 max s_t.

    Binomial expansion of each term. Low orders cancel exactly (the weights
    integrate low-degree polynomials exactly); computed values at roundoff
    level are set to zero so the far-field weights keep full relative accuracy.
    """
    n = _SERIES_TERMS
    c = np.zeros(n)
    mag = np.zeros(n)
    for coef, shift, p, e in _terms(nu, kind):
        off = 2 - e  # a**(1-nu) = a**(2-nu) * a**-1
        b = np.ones(n - off)
        for i in range(1, n - off):
            b[i] = b[i - 1] * (p - i + 1) / i
        contrib = coef * b * float(shift) ** np.arange(n - off)
        c[off:] += contrib
        mag[off:] += np.abs(contrib)
    c[np.abs(c) <= 1e-12 * mag] = 0.0
    c.setflags(write=False)
    return c


def _combo(nu: float, kind: str, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    terms = _terms(nu, kind)
    smax = max(t[1] for t in terms)
    far = a >= max(8.0, 2.0 * smax)
    out = np.empty_like(a)
    near = ~far
    if near.any():
        out[near] = sum(coef * _pw(a[near] + shift, p) for coef, shift, p, _ in terms)
    if far.any():
        af = a[far]
        out[far] = af ** (2.0 - nu) * np.polynomial.polynomial.polyval(1.0 / af, _series(nu, kind))
    return out


def _even_node(nu: float, m: int, k: np.ndarray) -> np.ndarray:
    """Weight of a node shared by two adjacent blocks (D-bar_{2k}, k = 1..m)."""
    return _combo(nu, "shared", 2.0 * m - 2.0 * np.asarray(k))


def _mid_node(nu: float, m: int, k: np.ndarray) -> np.ndarray:
    """Weight of a block midpoint (D-bar_{2k+1}, k = 0..m)."""
    return _combo(nu, "mid", 2.0 * m - 2.0 * np.asarray(k))


def _odd_row(nu: float, m: int) -> np.ndarray:
    row = np.empty(2 * m + 2)
    row[0] = _combo(nu, "odd0", 2.0 * m)
    row[1] = _combo(nu, "odd1", 2.0 * m - 2.0)
    row[2] = _combo(nu, "odd2", 2.0 * m - 2.0)
    if m >= 2:
        k = np.arange(2, m + 1)
        row[2 * k] = _mid_node(nu, m, k)
        row[2 * k - 1] = _even_node(nu, m, k)
    row[:-1] /= gamma_fn(3.0 - nu)
    return row


def _even_row(nu: float, m: int) -> np.ndarray:
    row = np.empty(2 * m + 3)
    row[0] = _combo(nu, "even0", 2.0 * m)
    k = np.arange(1, m + 1)
    row[2 * k] = _even_node(nu, m, k)
    k = np.arange(0, m + 1)
    row[2 * k + 1] = _mid_node(nu, m, k)
    row[:-1] /= gamma_fn(3.0 - nu)
    return row


_lock = threading.Lock()
_rows: dict[tuple[float, int], np.ndarray] = {}


def row_weights(nu: float, j: int) -> np.ndarray:
    """Full weight vector for step ``j >= 1`` (length max(j, 2) + 1), without dx**-nu.

    Rows j >= 3 are cached per (nu, j) and returned read-only.
    """
    nu = check_order(nu)
    j = int(j)
    if j == 1:
        return np.array(first_step_weights(nu).dhat)
    if j == 2:
        return np.array(first_step_weights(nu).dtilde)
    if j < 1:
        raise IndexError(f"step index must be >= 1, got {j}")
    key = (nu, j)
    row = _rows.get(key)
    if row is not None:
        return row
    row = _odd_row(nu, (j - 1) // 2) if j % 2 else _even_row(nu, (j - 2) // 2)
    row[-1] = alpha0(nu)
    row.setflags(write=False)
    with _lock:
        row = _rows.setdefault(key, row)
    return row


def history_row(nu: float, j: int) -> HistoryRow:
    """History weights D^(m) (j = 2m+1) or D-bar^(m) (j = 2m+2) for ``j >= 3``."""
    if int(j) < 3:
        raise IndexError(f"history rows start at j = 3, got {j}")
    return HistoryRow(int(j), row_weights(nu, j))


def clear_cache() -> None:
    with _lock:
        _rows.clear()
    _first_step.cache_clear()
    _series.cache_clear()

