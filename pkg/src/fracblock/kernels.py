"""Coefficient sequences behind the stability and convergence analysis.

For the model problem D^nu y = -lambda y every step j >= 3 can be written as

    (1 + lambda dx**nu / alpha0) y_j = sum_k d_k^j y_k.

Substituting ybar_j = y_j - theta y_{j-1} with theta = 2 nu / (2 + nu) gives
coefficients dbar_k^j that are all positive, and from those the convolution
kernel Bbar_k^n and its complementary kernel P_j^n. None of this is used by
the solver; it exists so the analysis can be checked numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .weights import alpha0, check_order, row_weights

__all__ = [
    "NU0",
    "NormalizedRow",
    "TransformedRow",
    "BbarKernel",
    "PKernel",
    "theta",
    "normalized_row",
    "transformed_row",
    "transformed_row_j3_closed_form",
    "transformed_row_direct",
    "bbar_kernel",
    "p_kernel",
    "sign_change_function",
]


def sign_change_function(nu: float) -> float:
    """h(nu) = 3(2 - nu) - (6 + nu) 2**-nu; d_{j-2}^j changes sign at its root."""
    return 3.0 * (2.0 - nu) - (6.0 + nu) * 2.0**-nu


def _bisect_nu0(tol: float = 1e-12) -> float:
    lo, hi = 0.01, 0.99
    if not sign_change_function(lo) > 0.0 > sign_change_function(hi):
        raise ArithmeticError("sign change function has no bracketed root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sign_change_function(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


NU0 = _bisect_nu0()


def theta(nu: float) -> float:
    nu = check_order(nu)
    return 2.0 * nu / (2.0 + nu)


@dataclass(frozen=True)
class NormalizedRow:
    nu: float
    j: int
    d: np.ndarray  # d_k^j, k = 0..j-1
    theta: float
    alpha0: float


@dataclass(frozen=True)
class TransformedRow:
    nu: float
    j: int
    dbar: np.ndarray  # dbar_k^j, k = 0..j-1


@dataclass(frozen=True)
class BbarKernel:
    nu: float
    dx: float
    n: int
    bbar: np.ndarray  # Bbar_k^n, k = 0..n-1, in units of dx**-nu already applied


@dataclass(frozen=True)
class PKernel:
    nu: float
    dx: float
    n: int
    p: np.ndarray  # P_j^n, j = 0..n-1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_index(j: int, what: str) -> int:
    j = int(j)
    if j < 3:
        raise IndexError(f"{what} is defined for index >= 3, got {j}")
    return j


@lru_cache(maxsize=4096)
def _normalized(nu: float, j: int) -> NormalizedRow:
    a0 = alpha0(nu)
    w = row_weights(nu, j)
    return NormalizedRow(nu, j, _frozen(-w[:-1] / a0), theta(nu), a0)


def normalized_row(nu: float, j: int) -> NormalizedRow:
    """d_k^j = -w_k / alpha0 for the history weights w of step ``j``."""
    return _normalized(check_order(nu), _check_index(j, "normalized row"))


def transformed_row_j3_closed_form(nu: float) -> np.ndarray:
    """(dbar_0^3, dbar_1^3, dbar_2^3) from their closed forms."""
    nu = check_order(nu)
    r = 2.0 / 3.0
    d2 = (nu + 6.0) / (nu + 2.0) - (4.0 + nu) / (nu + 2.0) * r ** (nu - 1.0)
    d1 = (-nu * nu - 12.0 + 3.0 * (nu * nu + 2.0 * nu + 4.0) * r**nu) / (2.0 + nu) ** 2
    d0 = 0.5 * (nu - 2.0) ** 2 / (nu + 2.0) ** 3 * (4.0 - 2.0 * nu + 3.0 * nu * r**nu)
    return np.array([d0, d1, d2])


def _recurrence(nrow: NormalizedRow) -> np.ndarray:
    d, th = nrow.d, nrow.theta
    dbar = np.empty_like(d)
    dbar[-1] = d[-1] - th
    for k in range(d.size - 2, -1, -1):
        dbar[k] = th * dbar[k + 1] + d[k]
    return dbar


@lru_cache(maxsize=4096)
def _transformed(nu: float, j: int) -> TransformedRow:
    if j == 3:
        dbar = transformed_row_j3_closed_form(nu)
        check = _recurrence(_normalized(nu, 3))
        if not np.allclose(dbar, check, rtol=1e-10, atol=1e-12):
            raise ArithmeticError(f"closed-form dbar^3 disagrees with the recurrence at nu={nu}: {dbar} vs {check}")
    else:
        dbar = _recurrence(_normalized(nu, j))
    return TransformedRow(nu, j, _frozen(dbar))


def transformed_row(nu: float, j: int) -> TransformedRow:
    """dbar_k^j via dbar_{j-1} = d_{j-1} - theta and dbar_k = theta dbar_{k+1} + d_k.

    For j >= 4 this gives dbar_{j-1} = theta and dbar_{j-2} = theta**2 + d_{j-2}.
    j = 3 uses closed forms, verified against the recurrence.
    """
    return _transformed(check_order(nu), _check_index(j, "transformed row"))


def transformed_row_direct(nu: float, j: int) -> np.ndarray:
    """O(j**2) double-sum definition of dbar_k^j (j >= 4), for cross-checking."""
    nu = check_order(nu)
    j = int(j)
    if j < 4:
        raise IndexError(f"double-sum form holds for j >= 4, got {j}")
    d = normalized_row(nu, j).d
    th = theta(nu)
    out = np.empty(j)
    for k in range(j):
        kp = np.arange(k, j - 1)
        out[k] = th ** (j - k) + float(np.sum(d[kp] * th ** (kp - k)))
    return out


def _check_step(dx: float) -> float:
    dx = float(dx)
    if not dx > 0.0:
        raise ValueError(f"step must be positive, got {dx!r}")
    return dx


@lru_cache(maxsize=4096)
def _bbar(nu: float, dx: float, n: int) -> BbarKernel:
    c = dx**-nu * alpha0(nu)
    dbar = _transformed(nu, n).dbar
    b = np.empty(n)
    b[0] = c
    # Bbar_{n-k} = Bbar_{n-k-1} - c dbar_k for k = n-1 down to 1
    b[1:] = c - c * np.cumsum(dbar[1:][::-1])
    return BbarKernel(nu, dx, n, _frozen(b))


def bbar_kernel(nu: float, dx: float, n: int) -> BbarKernel:
    """Bbar_0^n = dx**-nu alpha0, Bbar_{n-k}^n = Bbar_{n-k-1}^n - dx**-nu alpha0 dbar_k^n."""
    return _bbar(check_order(nu), _check_step(dx), _check_index(n, "Bbar kernel"))


@lru_cache(maxsize=512)
def _p(nu: float, dx: float, n: int) -> PKernel:
    p = np.zeros(n)
    p[0] = 1.0 / _bbar(nu, dx, n).bbar[0]
    for j in range(1, n - 2):
        acc = 0.0
        for k in range(j):
            b = _bbar(nu, dx, n - k).bbar
            acc += (b[j - k - 1] - b[j - k]) * p[k]
        p[j] = acc / _bbar(nu, dx, n - j).bbar[0]
    return PKernel(nu, dx, n, _frozen(p))


def p_kernel(nu: float, dx: float, n: int) -> PKernel:
    """Complementary kernel P_j^n, j = 0..n-1, with P_{n-2}^n = P_{n-1}^n = 0."""
    return _p(check_order(nu), _check_step(dx), _check_index(n, "P kernel"))
